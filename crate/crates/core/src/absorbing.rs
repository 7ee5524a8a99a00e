//! Unlabeled elementary absorbing sets (UAS): configurations, instances and
//! their enumeration in a Tanner graph.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::cycles::{minimum_cycle_basis, CycleBasis};
use crate::error::{Error, Result};
use crate::relocation::UnitLayout;
use crate::tanner::{BinaryMatrix, TannerGraph};

/// An `(a, d1)` configuration in a code of column weight `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UasConfig {
    pub a: usize,
    pub d1: usize,
    pub gamma: usize,
}

impl UasConfig {
    pub fn new(a: usize, d1: usize, gamma: usize) -> Result<Self> {
        let c = Self { a, d1, gamma };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, d1, gamma } = *self;
        if a == 0 || gamma == 0 {
            return Err(Error::InvalidConfig(format!(
                "{self}: a and gamma must be positive"
            )));
        }
        if d1 >= gamma * a || (a * gamma - d1) % 2 == 1 {
            return Err(Error::InvalidConfig(format!(
                "{self}: a*gamma - d1 must be a nonnegative even number"
            )));
        }
        if d1 > a * ((gamma - 1) / 2) {
            return Err(Error::InvalidConfig(format!(
                "{self}: some VN would have at least as many degree-1 as degree-2 neighbours"
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("{}_{}_g{}", self.a, self.d1, self.gamma)
    }
}

impl std::fmt::Display for UasConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}) gamma={}", self.a, self.d1, self.gamma)
    }
}

/// Number of degree-2 CNs, `(a*gamma - d1) / 2`.
pub fn d2_of(c: &UasConfig) -> Result<usize> {
    let total = c.a * c.gamma;
    if c.d1 > total || (total - c.d1) % 2 == 1 {
        return Err(Error::InvalidConfig(format!(
            "{c}: a*gamma - d1 is not a nonnegative even number"
        )));
    }
    Ok((total - c.d1) / 2)
}

/// Number of basic cycles, `d2 - a + 1`.
pub fn nf_of(c: &UasConfig) -> Result<usize> {
    let d2 = d2_of(c)?;
    (d2 + 1)
        .checked_sub(c.a)
        .ok_or_else(|| Error::InvalidConfig(format!("{c}: negative number of basic cycles")))
}

/// Bounds `(n_f(n_f+1)/2, 2^n_f - 1)` on the number of cycles of a UAS.
pub fn cycle_count_bounds(n_f: usize) -> (u64, u64) {
    let n = n_f as u64;
    (n * (n + 1) / 2, (1u64 << n_f) - 1)
}

/// Sufficient-condition classification; `None` means undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub non_regenerable: Option<bool>,
    pub stand_alone: Option<bool>,
}

pub fn classify_config(c: &UasConfig) -> Classification {
    if c.d1 == 0 {
        return Classification {
            non_regenerable: Some(true),
            stand_alone: Some(true),
        };
    }
    let complete = d2_of(c).is_ok_and(|d2| d2 == c.a * (c.a - 1) / 2);
    Classification {
        non_regenerable: complete.then_some(true),
        stand_alone: None,
    }
}

/// One UAS instance inside a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UasInstance {
    vns: Vec<usize>,
    deg2_cns: Vec<usize>,
    deg1_cns: Vec<usize>,
    deg2_edges: Vec<usize>,
    deg1_edges: Vec<usize>,
}

impl UasInstance {
    /// Checks the VN set against the UAS definition in `g`: every neighbouring
    /// CN has degree 1 or 2 inside the set, each VN has strictly more degree-2
    /// than degree-1 neighbours and the degree-2 subgraph is connected.
    pub fn from_vns(g: &TannerGraph, vns: &[usize]) -> Option<Self> {
        let mut vns = vns.to_vec();
        vns.sort_unstable();
        vns.dedup();
        if vns.is_empty() {
            return None;
        }
        let mut by_cn: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &vns {
            for e in g.vn_edges(v) {
                by_cn.entry(e.cn).or_default().push(e.entry);
            }
        }
        let mut deg2_cns = Vec::new();
        let mut deg1_cns = Vec::new();
        let mut deg2_edges = Vec::new();
        let mut deg1_edges = Vec::new();
        for (cn, edges) in by_cn {
            match edges.len() {
                1 => {
                    deg1_cns.push(cn);
                    deg1_edges.extend(edges);
                }
                2 => {
                    deg2_cns.push(cn);
                    deg2_edges.extend(edges);
                }
                _ => return None,
            }
        }
        deg2_edges.sort_unstable();
        deg1_edges.sort_unstable();
        let u = Self {
            vns,
            deg2_cns,
            deg1_cns,
            deg2_edges,
            deg1_edges,
        };
        for &v in &u.vns {
            let (mut two, mut one) = (0, 0);
            for e in g.vn_edges(v) {
                if u.deg2_cns.binary_search(&e.cn).is_ok() {
                    two += 1;
                } else {
                    one += 1;
                }
            }
            if two <= one {
                return None;
            }
        }
        let sub = u.deg2_subgraph(g);
        (sub.vns().len() == u.vns.len() && sub.is_connected()).then_some(u)
    }

    pub fn a(&self) -> usize {
        self.vns.len()
    }

    pub fn d1(&self) -> usize {
        self.deg1_cns.len()
    }

    pub fn d2(&self) -> usize {
        self.deg2_cns.len()
    }

    pub fn vns(&self) -> &[usize] {
        &self.vns
    }

    /// Degree-2 CNs, ascending.
    pub fn deg2_cns(&self) -> &[usize] {
        &self.deg2_cns
    }

    /// Degree-1 CNs, ascending.
    pub fn deg1_cns(&self) -> &[usize] {
        &self.deg1_cns
    }

    /// Entry-ids of the edges at degree-2 CNs, ascending.
    pub fn deg2_edges(&self) -> &[usize] {
        &self.deg2_edges
    }

    pub fn deg1_edges(&self) -> &[usize] {
        &self.deg1_edges
    }

    /// All edges between the VN set and its CNs, ascending.
    pub fn induced_edges(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .deg2_edges
            .iter()
            .chain(&self.deg1_edges)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }

    /// Subgraph of `g` formed by the degree-2 CNs and their edges.
    pub fn deg2_subgraph(&self, g: &TannerGraph) -> TannerGraph {
        g.subgraph(|e| self.deg2_edges.binary_search(&e.entry).is_ok())
    }

    pub fn cycle_basis(&self, g: &TannerGraph) -> Result<CycleBasis> {
        minimum_cycle_basis(&self.deg2_subgraph(g))
    }

    pub fn matches(&self, c: &UasConfig) -> bool {
        self.a() == c.a && self.d1() == c.d1
    }
}

/// All instances of configuration `c` in `g`, sorted by VN set.
///
/// Connected VN sets are grown ESU-style from each anchor VN, extending only
/// with larger VN ids, and a branch is cut as soon as some CN reaches degree 3
/// inside the set.
pub fn enumerate_uas(g: &TannerGraph, c: &UasConfig) -> Vec<UasInstance> {
    if c.a == 0 {
        return Vec::new();
    }
    let neighbours = vn_neighbourhoods(g);
    let mut out: Vec<UasInstance> = g
        .vns()
        .par_iter()
        .flat_map_iter(|&anchor| {
            let mut esu = Esu {
                g,
                c,
                neighbours: &neighbours,
                anchor,
                set: vec![anchor],
                in_set_or_nbr: vec![0u32; g.vn_bound()],
                cn_count: vec![0u8; g.cn_bound()],
                found: Vec::new(),
            };
            if esu.add(anchor) {
                esu.mark(anchor, 1);
                let ext: Vec<usize> = neighbours[anchor]
                    .iter()
                    .copied()
                    .filter(|&u| u > anchor)
                    .collect();
                esu.extend(ext);
            }
            esu.found
        })
        .collect();
    out.sort();
    out
}

fn vn_neighbourhoods(g: &TannerGraph) -> Vec<Vec<usize>> {
    let mut nbrs = vec![Vec::new(); g.vn_bound()];
    for &v in g.vns() {
        let mut set = BTreeSet::new();
        for e in g.vn_edges(v) {
            for f in g.cn_edges(e.cn) {
                if f.vn != v {
                    set.insert(f.vn);
                }
            }
        }
        nbrs[v] = set.into_iter().collect();
    }
    nbrs
}

struct Esu<'a> {
    g: &'a TannerGraph,
    c: &'a UasConfig,
    neighbours: &'a [Vec<usize>],
    anchor: usize,
    set: Vec<usize>,
    // >0 when the VN is in the set or adjacent to it (reference count)
    in_set_or_nbr: Vec<u32>,
    cn_count: Vec<u8>,
    found: Vec<UasInstance>,
}

impl Esu<'_> {
    // Adds v's CN incidences; on a degree-3 CN undoes them and returns false.
    fn add(&mut self, v: usize) -> bool {
        let mut ok = true;
        for e in self.g.vn_edges(v) {
            self.cn_count[e.cn] += 1;
            if self.cn_count[e.cn] > 2 {
                ok = false;
            }
        }
        if !ok {
            self.remove(v);
        }
        ok
    }

    fn remove(&mut self, v: usize) {
        for e in self.g.vn_edges(v) {
            self.cn_count[e.cn] -= 1;
        }
    }

    fn mark(&mut self, v: usize, delta: i32) {
        let apply = |x: &mut u32| *x = (*x as i32 + delta) as u32;
        apply(&mut self.in_set_or_nbr[v]);
        for &u in &self.neighbours[v] {
            apply(&mut self.in_set_or_nbr[u]);
        }
    }

    fn extend(&mut self, mut ext: Vec<usize>) {
        if self.set.len() == self.c.a {
            if let Some(u) = UasInstance::from_vns(self.g, &self.set) {
                if u.matches(self.c) {
                    self.found.push(u);
                }
            }
            return;
        }
        while let Some(w) = ext.pop() {
            if !self.add(w) {
                continue;
            }
            // exclusive neighbours of w: not in the set and not adjacent to it
            let mut next = ext.clone();
            for &u in &self.neighbours[w] {
                if u > self.anchor && self.in_set_or_nbr[u] == 0 {
                    next.push(u);
                }
            }
            self.set.push(w);
            self.mark(w, 1);
            self.extend(next);
            self.mark(w, -1);
            self.set.pop();
            self.remove(w);
        }
    }
}

/// Per-unit number of instances involving the unit, i.e. having at least one
/// degree-2 edge inside it. With `active` given, only instances flagged true
/// are counted. Every unit of the layout appears in the result.
pub fn involvement_counts(
    instances: &[UasInstance],
    active: Option<&[bool]>,
    layout: &UnitLayout,
) -> Result<BTreeMap<(usize, usize), usize>> {
    let mut counts: BTreeMap<(usize, usize), usize> =
        layout.units().iter().map(|&k| (k, 0)).collect();
    for (i, u) in instances.iter().enumerate() {
        if active.is_some_and(|a| !a[i]) {
            continue;
        }
        for unit in involved_units(u, layout)? {
            *counts
                .get_mut(&layout.units()[unit])
                .expect("unit from layout") += 1;
        }
    }
    Ok(counts)
}

/// Indices (into `layout.units()`) of the units an instance involves.
pub fn involved_units(u: &UasInstance, layout: &UnitLayout) -> Result<BTreeSet<usize>> {
    u.deg2_edges()
        .iter()
        .map(|&e| {
            layout
                .unit_of_entry(e)
                .ok_or_else(|| Error::Internal(format!("entry {e} has no unit")))
        })
        .collect()
}

/// Two small fixtures: a (4, 2) UAS with gamma = 3 and a (4, 4) UAS with
/// gamma = 4.
///
/// Rows are CNs `c1..c5` (`c1..c6` for the (4, 4)) followed by the degree-1
/// CNs; columns are `v1..v4`.
#[derive(Debug, Clone)]
pub struct CanonicalUas {
    name: &'static str,
    config: UasConfig,
    incidence: BinaryMatrix,
}

impl CanonicalUas {
    pub const NAMES: [&'static str; 2] = ["4_2_g3", "4_4_g4"];

    pub fn by_name(name: &str) -> Option<Self> {
        let name = name.strip_prefix("uas:").unwrap_or(name);
        // degree-2 CNs as VN pairs, 0-based
        let mut cns: Vec<Vec<usize>> =
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0], vec![1, 3]];
        let (name, config) = match name {
            "4_2_g3" => {
                cns.extend([vec![0], vec![2]]);
                (
                    "4_2_g3",
                    UasConfig {
                        a: 4,
                        d1: 2,
                        gamma: 3,
                    },
                )
            }
            "4_4_g4" => {
                cns.push(vec![0, 2]);
                cns.extend((0..4).map(|v| vec![v]));
                (
                    "4_4_g4",
                    UasConfig {
                        a: 4,
                        d1: 4,
                        gamma: 4,
                    },
                )
            }
            _ => return None,
        };
        let positions = cns
            .iter()
            .enumerate()
            .flat_map(|(r, vs)| vs.iter().map(move |&v| (r, v)));
        let incidence = BinaryMatrix::new(cns.len(), 4, positions).expect("fixture is valid");
        Some(Self {
            name,
            config,
            incidence,
        })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn config(&self) -> UasConfig {
        self.config
    }

    pub fn incidence(&self) -> &BinaryMatrix {
        &self.incidence
    }

    /// The instance made of all four VNs of the fixture.
    pub fn instance(&self, g: &TannerGraph) -> UasInstance {
        UasInstance::from_vns(g, &[0, 1, 2, 3]).expect("fixture is a UAS")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tanner::{build_graph, check_no_4cycles, check_regular_gamma};

    #[test]
    fn d2_and_nf() {
        let c42 = UasConfig::new(4, 2, 3).unwrap();
        let c44 = UasConfig::new(4, 4, 4).unwrap();
        assert_eq!(d2_of(&c42).unwrap(), 5);
        assert_eq!(d2_of(&c44).unwrap(), 6);
        assert_eq!(d2_of(&UasConfig::new(6, 0, 3).unwrap()).unwrap(), 9);
        assert_eq!(nf_of(&c42).unwrap(), 2);
        assert_eq!(nf_of(&c44).unwrap(), 3);
        assert_eq!(nf_of(&UasConfig::new(4, 0, 3).unwrap()).unwrap(), 3);
    }

    #[test]
    fn invalid_configs() {
        assert!(UasConfig::new(4, 1, 3).is_err());
        assert!(UasConfig::new(4, 6, 3).is_err());
        assert!(d2_of(&UasConfig {
            a: 3,
            d1: 2,
            gamma: 3
        })
        .is_err());
        assert!(nf_of(&UasConfig {
            a: 4,
            d1: 4,
            gamma: 2
        })
        .is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(cycle_count_bounds(2), (3, 3));
        assert_eq!(cycle_count_bounds(3), (6, 7));
        assert_eq!(cycle_count_bounds(1), (1, 1));
    }

    #[test]
    fn classification() {
        let c = |a, d1, g| classify_config(&UasConfig::new(a, d1, g).unwrap());
        assert_eq!(
            c(4, 0, 3),
            Classification {
                non_regenerable: Some(true),
                stand_alone: Some(true)
            }
        );
        assert_eq!(
            c(4, 4, 4),
            Classification {
                non_regenerable: Some(true),
                stand_alone: None
            }
        );
        assert_eq!(
            c(6, 2, 3),
            Classification {
                non_regenerable: None,
                stand_alone: None
            }
        );
    }

    #[test]
    fn canonical_fixtures() {
        let u42 = CanonicalUas::by_name("uas:4_2_g3").unwrap();
        let g = build_graph(u42.incidence());
        let cols = u42.incidence().column_weights();
        assert_eq!(cols, vec![3; 4]);
        assert_eq!(check_regular_gamma(u42.incidence()), Some(3));
        assert!(check_no_4cycles(&g));
        let found = enumerate_uas(&g, &u42.config());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].d2(), 5);
        assert_eq!(found[0].deg1_cns(), &[5, 6]);

        let u44 = CanonicalUas::by_name("4_4_g4").unwrap();
        let g = build_graph(u44.incidence());
        assert_eq!(check_regular_gamma(u44.incidence()), Some(4));
        assert!(check_no_4cycles(&g));
        let found = enumerate_uas(&g, &u44.config());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].d2(), 6);
        assert!(CanonicalUas::by_name("nope").is_none());
    }

    #[test]
    fn path_is_a_cycle_free_set() {
        let m = BinaryMatrix::from_dense(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1]]).unwrap();
        let g = build_graph(&m);
        let found = enumerate_uas(
            &g,
            &UasConfig {
                a: 4,
                d1: 0,
                gamma: 2,
            },
        );
        assert_eq!(found.len(), 1);
        assert!(found[0].cycle_basis(&g).unwrap().is_empty());
        for d1 in 1..=2 {
            assert!(enumerate_uas(&g, &UasConfig { a: 4, d1, gamma: 2 }).is_empty());
        }
    }

    #[test]
    fn definition_checks() {
        let u42 = CanonicalUas::by_name("4_2_g3").unwrap();
        let g = build_graph(u42.incidence());
        // three VNs: v1, v2, v4 -> c1, c4, c5 degree 2; v1 has o1 and none else
        let sub = UasInstance::from_vns(&g, &[0, 1, 3]).unwrap();
        assert_eq!((sub.a(), sub.d2()), (3, 3));
        // v1, v3 are not connected through degree-2 CNs
        assert!(UasInstance::from_vns(&g, &[0, 2]).is_none());
    }
}
