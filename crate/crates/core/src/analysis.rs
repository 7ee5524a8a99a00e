//! Closed-form fractions of relocation arrangements and the derived savings.
//!
//! Every formula is generic over the scalar type. Use [`crate::Rational`]
//! for exact results; `f64` is handy for plotting and quick sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug, Display};

use num_traits::{FromPrimitive, Num};

use crate::cycles::CycleBasis;
use crate::relocation::Modulus;
use crate::tanner::TannerGraph;

/// Scalar types the fraction formulas can be evaluated in.
pub trait Scalar: Clone + PartialOrd + Debug + Num + FromPrimitive {}

impl<T: Clone + PartialOrd + Debug + Num + FromPrimitive> Scalar for T {}

fn int<T: Scalar>(x: i64) -> T {
    T::from_i64(x).expect("small integers are representable")
}

fn pow<T: Scalar>(base: T, exp: usize) -> T {
    (0..exp).fold(T::one(), |acc, _| acc * base.clone())
}

fn positive_part<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        T::zero()
    } else {
        x
    }
}

/// CN-set intersections of the basic cycles of a UAS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisIntersections {
    /// CNs of each basic cycle.
    pub cn_sets: Vec<BTreeSet<usize>>,
    /// Pairwise intersections, keyed by `(i, j)` with `i < j`.
    pub pairwise: BTreeMap<(usize, usize), BTreeSet<usize>>,
    /// CNs of cycle `i` shared with any other basic cycle.
    pub shared: Vec<BTreeSet<usize>>,
    /// CNs of cycle `i` shared with no other basic cycle.
    pub exclusive: Vec<BTreeSet<usize>>,
    /// Distinct nonempty exclusive groups.
    pub l1: BTreeSet<Vec<usize>>,
    /// Distinct nonempty pairwise-intersection groups.
    pub l2: BTreeSet<Vec<usize>>,
}

pub fn basis_intersections(b: &CycleBasis, g: &TannerGraph) -> BasisIntersections {
    let cn_sets: Vec<BTreeSet<usize>> = b.cycles().iter().map(|c| c.cns(g)).collect();
    let n = cn_sets.len();
    let mut pairwise = BTreeMap::new();
    let mut shared = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let common: BTreeSet<usize> = cn_sets[i].intersection(&cn_sets[j]).copied().collect();
            shared[i].extend(common.iter().copied());
            shared[j].extend(common.iter().copied());
            pairwise.insert((i, j), common);
        }
    }
    let exclusive: Vec<BTreeSet<usize>> = cn_sets
        .iter()
        .zip(&shared)
        .map(|(f, s)| f.difference(s).copied().collect())
        .collect();
    let group = |s: &BTreeSet<usize>| s.iter().copied().collect::<Vec<_>>();
    let l1 = exclusive
        .iter()
        .filter(|d| !d.is_empty())
        .map(group)
        .collect();
    let l2 = pairwise
        .values()
        .filter(|s| !s.is_empty())
        .map(group)
        .collect();
    BasisIntersections {
        cn_sets,
        pairwise,
        shared,
        exclusive,
        l1,
        l2,
    }
}

/// Fractions of relocation arrangements for one UAS.
///
/// * `f_nof`: all basic cycles become inactive.
/// * `f_noc_bound`: upper bound on the fraction making every cycle inactive.
/// * `f_nou`: the UAS becomes inactive.
/// * `f_not`: the copies produce only objects with at least two disconnected CNs.
/// * `f_0`: the UAS stays active.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionReport<T> {
    pub modulus: u32,
    pub n_f: usize,
    pub l1: usize,
    pub l2: usize,
    pub f_nof: T,
    pub f_noc_bound: T,
    pub f_nou: T,
    pub f_not: T,
    pub f_0: T,
    pub s1_pct: T,
    pub s2_pct: T,
}

impl<T: Scalar> FractionReport<T> {
    /// The closed form for `f_not` has no clamp and can go negative when
    /// `l1 + l2` is large relative to `M`.
    pub fn f_not_negative(&self) -> bool {
        self.f_not < T::zero()
    }
}

pub const TSV_HEADER: &str =
    "config\tM\tn_f\tl1\tl2\tf_nof\tf_noc_bound\tf_nou\tf_not\ts1_pct\ts2_pct";

impl<T: Display> FractionReport<T> {
    pub fn tsv_row(&self, config: &str) -> String {
        format!(
            "{config}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.modulus,
            self.n_f,
            self.l1,
            self.l2,
            self.f_nof,
            self.f_noc_bound,
            self.f_nou,
            self.f_not,
            self.s1_pct,
            self.s2_pct
        )
    }
}

impl<T: Display> Display for FractionReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M={} n_f={} |L1|={} |L2|={} F_nof={} F_noc<={} F_nou={} F_not={} S1={}% S2={}%",
            self.modulus,
            self.n_f,
            self.l1,
            self.l2,
            self.f_nof,
            self.f_noc_bound,
            self.f_nou,
            self.f_not,
            self.s1_pct,
            self.s2_pct
        )
    }
}

/// Evaluates all closed-form fractions for `n_f` basic cycles.
pub fn fractions<T: Scalar>(n_f: usize, m: Modulus, l1: usize, l2: usize) -> FractionReport<T> {
    let mi = m.get() as i64;
    let big_m: T = int(mi);
    let f_0 = T::one() / pow(big_m.clone(), n_f);
    let f_nof = pow(int::<T>(mi - 1) / big_m.clone(), n_f);
    let f_noc_bound = (1..=n_f as i64).fold(T::one(), |acc, delta| {
        acc * positive_part(int::<T>(mi - delta) / big_m.clone())
    });
    let f_nou = T::one() - f_0.clone();
    let f_not = f_nou.clone() - int::<T>((l1 + l2) as i64 * (mi - 1)) * f_0.clone();
    let mut r = FractionReport {
        modulus: m.get(),
        n_f,
        l1,
        l2,
        f_nof,
        f_noc_bound,
        f_nou,
        f_not,
        f_0,
        s1_pct: T::zero(),
        s2_pct: T::zero(),
    };
    let (s1, s2) = savings(&r);
    r.s1_pct = s1;
    r.s2_pct = s2;
    r
}

/// Percentage savings `(S1, S2)` of targeting the UAS rather than its cycles.
pub fn savings<T: Scalar>(r: &FractionReport<T>) -> (T, T) {
    let hundred: T = int(100);
    (
        (r.f_nou.clone() - r.f_noc_bound.clone()) * hundred.clone(),
        (r.f_not.clone() - r.f_nof.clone()) * hundred,
    )
}

/// Mean number of MD instances of a non-regenerable, stand-alone UAS under
/// uniformly random relocations: `a_od * M^(1 - n_f)`.
pub fn avg_md_instances<T: Scalar>(a_od: u64, n_f: usize, m: Modulus) -> T {
    let big_m: T = int(m.get() as i64);
    T::from_u64(a_od).expect("count is representable") * big_m.clone() / pow(big_m, n_f)
}
