//! Relocation maps, cycle/UAS activity and assembly of the MD matrix.
//!
//! The MD matrix couples `M` copies of the OD matrix. Block `(i, j)` of the
//! assembled matrix is `H'` on the diagonal and `X_{(i - j) mod M}` elsewhere,
//! so an entry relocated to `X_l` joins VN copy `j` to CN copy `(j + l) mod M`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use crate::absorbing::UasInstance;
use crate::cycles::{Cycle, CycleBasis};
use crate::error::{Error, Result};
use crate::tanner::{BinaryMatrix, QcMatrix};

/// Number of coupled copies; a prime greater than 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(m: u32) -> Result<Self> {
        let prime = m >= 2
            && (2..)
                .take_while(|d| d * d <= m)
                .all(|d| !m.is_multiple_of(d));
        if !prime || m == 2 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn usize(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    Entry,
    Circulant,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Entry => "entry",
            Granularity::Circulant => "circulant",
        })
    }
}

/// Partition of the NZ entries of a matrix into relocation units.
///
/// Unit keys are `(row, col)` positions for entry granularity and
/// `(block_row, block_col)` for circulant granularity; units are sorted by key.
#[derive(Debug, Clone)]
pub struct UnitLayout {
    granularity: Granularity,
    units: Vec<(usize, usize)>,
    members: Vec<Vec<usize>>,
    unit_of_entry: Vec<usize>,
}

impl UnitLayout {
    /// Every NZ entry is its own unit.
    pub fn entries(h: &BinaryMatrix) -> Self {
        Self {
            granularity: Granularity::Entry,
            units: h.entries().to_vec(),
            members: (0..h.nnz()).map(|e| vec![e]).collect(),
            unit_of_entry: (0..h.nnz()).collect(),
        }
    }

    /// Units are the NZ circulants of `q`; entry-ids refer to `expand_qc(q)`.
    pub fn circulants(q: &QcMatrix, expanded: &BinaryMatrix) -> Self {
        let units: Vec<(usize, usize)> = q.blocks().keys().copied().collect();
        let mut members = vec![Vec::new(); units.len()];
        let mut unit_of_entry = Vec::with_capacity(expanded.nnz());
        for (id, &(r, c)) in expanded.entries().iter().enumerate() {
            let u = units
                .binary_search(&q.block_of(r, c))
                .expect("expanded entry lies in a NZ circulant");
            members[u].push(id);
            unit_of_entry.push(u);
        }
        Self {
            granularity: Granularity::Circulant,
            units,
            members,
            unit_of_entry,
        }
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn units(&self) -> &[(usize, usize)] {
        &self.units
    }

    pub fn unit_index(&self, key: (usize, usize)) -> Option<usize> {
        self.units.binary_search(&key).ok()
    }

    /// Entry-ids belonging to unit `u`.
    pub fn members(&self, u: usize) -> &[usize] {
        &self.members[u]
    }

    pub fn unit_of_entry(&self, entry: usize) -> Option<usize> {
        self.unit_of_entry.get(entry).copied()
    }

    pub fn entry_count(&self) -> usize {
        self.unit_of_entry.len()
    }
}

/// Assignment of relocation values to units; unassigned units are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelocationMap {
    modulus: Modulus,
    granularity: Granularity,
    assignment: BTreeMap<(usize, usize), u32>,
}

impl RelocationMap {
    pub fn new(modulus: Modulus, granularity: Granularity) -> Self {
        Self {
            modulus,
            granularity,
            assignment: BTreeMap::new(),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn set(&mut self, unit: (usize, usize), value: u32) -> Result<()> {
        if value >= self.modulus.get() {
            return Err(Error::RelocationValue {
                value,
                modulus: self.modulus.get(),
            });
        }
        if value == 0 {
            self.assignment.remove(&unit);
        } else {
            self.assignment.insert(unit, value);
        }
        Ok(())
    }

    pub fn get(&self, unit: (usize, usize)) -> u32 {
        self.assignment.get(&unit).copied().unwrap_or(0)
    }

    /// Nonzero assignments, sorted by unit.
    pub fn assignments(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.assignment.iter().map(|(&k, &v)| (k, v))
    }

    pub fn relocated_units(&self) -> usize {
        self.assignment.len()
    }

    /// Per-entry values under `layout`. Fails if a unit assigned here is not a
    /// unit of the layout (i.e. a zero position or zero circulant).
    pub fn entry_values(&self, layout: &UnitLayout) -> Result<Vec<u32>> {
        if layout.granularity() != self.granularity {
            return Err(Error::Dimension(format!(
                "map has {} granularity, layout has {}",
                self.granularity,
                layout.granularity()
            )));
        }
        let mut values = vec![0; layout.entry_count()];
        for (&key, &v) in &self.assignment {
            let u = layout
                .unit_index(key)
                .ok_or(Error::ZeroPosition(key.0, key.1))?;
            for &e in layout.members(u) {
                values[e] = v;
            }
        }
        Ok(values)
    }

    /// Text form: a `reloc M=<M> granularity=<g>` header, then one
    /// `c <block_row> <block_col> <l>` or `e <row> <col> <l>` line per
    /// nonzero assignment.
    pub fn to_text(&self) -> String {
        let tag = match self.granularity {
            Granularity::Entry => 'e',
            Granularity::Circulant => 'c',
        };
        let mut out = format!(
            "reloc M={} granularity={}\n",
            self.modulus, self.granularity
        );
        for (&(a, b), v) in &self.assignment {
            let _ = writeln!(out, "{tag} {a} {b} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing reloc header"))?;
        let mut modulus = None;
        let mut granularity = None;
        let mut words = header.split_whitespace();
        if words.next() != Some("reloc") {
            return Err(Error::parse(
                line,
                format!("expected reloc header, found {header:?}"),
            ));
        }
        for w in words {
            match w.split_once('=') {
                Some(("M", v)) => {
                    let m: u32 = v
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad modulus {v:?}")))?;
                    modulus = Some(Modulus::new(m)?);
                }
                Some(("granularity", "entry")) => granularity = Some(Granularity::Entry),
                Some(("granularity", "circulant")) => granularity = Some(Granularity::Circulant),
                _ => return Err(Error::parse(line, format!("unknown header field {w:?}"))),
            }
        }
        let (Some(modulus), Some(granularity)) = (modulus, granularity) else {
            return Err(Error::parse(line, "header needs M= and granularity="));
        };
        let want = match granularity {
            Granularity::Entry => "e",
            Granularity::Circulant => "c",
        };
        let mut map = Self::new(modulus, granularity);
        for (line, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let [tag, a, b, v] = toks[..] else {
                return Err(Error::parse(
                    line,
                    format!("expected 4 fields, found {l:?}"),
                ));
            };
            if tag != want {
                return Err(Error::parse(
                    line,
                    format!("line tag {tag:?} does not match {granularity} granularity"),
                ));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("expected integer, found {s:?}")))
            };
            let key = (num(a)?, num(b)?);
            let value = num(v)? as u32;
            if map.assignment.contains_key(&key) {
                return Err(Error::parse(line, format!("unit {key:?} assigned twice")));
            }
            map.set(key, value)
                .map_err(|e| Error::parse(line, e.to_string()))?;
        }
        Ok(map)
    }
}

/// `sum_w (-1)^w R(E_w) mod M` over the stored entry order, `w` from 1.
pub fn alternating_sum(cycle: &Cycle, values: &[u32], m: Modulus) -> u32 {
    let m = m.get() as u64;
    let mut acc = 0u64;
    for (i, &e) in cycle.entries().iter().enumerate() {
        let v = values[e] as u64 % m;
        // w = i + 1: odd w subtracts
        acc = if i % 2 == 0 {
            (acc + m - v) % m
        } else {
            (acc + v) % m
        };
    }
    acc as u32
}

pub fn is_cycle_active(cycle: &Cycle, values: &[u32], m: Modulus) -> bool {
    alternating_sum(cycle, values, m) == 0
}

/// The UAS stays active iff every basic cycle of `basis` stays active.
pub fn is_uas_active(
    u: &UasInstance,
    basis: &CycleBasis,
    values: &[u32],
    m: Modulus,
) -> Result<bool> {
    if basis.universe() != u.deg2_edges() {
        return Err(Error::BasisMismatch(
            "basis edge universe differs from the instance's degree-2 edges".into(),
        ));
    }
    Ok(basis.cycles().iter().all(|c| is_cycle_active(c, values, m)))
}

/// `H'_OD` and the auxiliary matrices `X_1..X_{M-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdParts {
    modulus: Modulus,
    h_od_prime: BinaryMatrix,
    aux: Vec<BinaryMatrix>,
}

impl MdParts {
    pub fn new(modulus: Modulus, h_od_prime: BinaryMatrix, aux: Vec<BinaryMatrix>) -> Result<Self> {
        if aux.len() != modulus.usize() - 1 {
            return Err(Error::Dimension(format!(
                "{} auxiliary matrices for M = {modulus}",
                aux.len()
            )));
        }
        let dims = (h_od_prime.n_rows(), h_od_prime.n_cols());
        if let Some(x) = aux.iter().find(|x| (x.n_rows(), x.n_cols()) != dims) {
            return Err(Error::Dimension(format!(
                "auxiliary matrix is {}x{}, expected {}x{}",
                x.n_rows(),
                x.n_cols(),
                dims.0,
                dims.1
            )));
        }
        Ok(Self {
            modulus,
            h_od_prime,
            aux,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn h_od_prime(&self) -> &BinaryMatrix {
        &self.h_od_prime
    }

    /// `X_l` for `l` in `1..M`.
    pub fn aux(&self, l: usize) -> &BinaryMatrix {
        &self.aux[l - 1]
    }

    /// `H'` for `l = 0`, `X_l` otherwise.
    pub fn part(&self, l: usize) -> &BinaryMatrix {
        if l == 0 {
            &self.h_od_prime
        } else {
            self.aux(l)
        }
    }
}

/// Index of the part placed at block `(i, j)`: 0 for `H'`, else `l` of `X_l`.
pub fn block_index(i: usize, j: usize, m: Modulus) -> usize {
    let m = m.usize();
    (i % m + m - j % m) % m
}

/// Splits `h` by per-entry relocation values.
pub fn split_matrices(h: &BinaryMatrix, values: &[u32], m: Modulus) -> Result<MdParts> {
    if values.len() != h.nnz() {
        return Err(Error::Dimension(format!(
            "{} relocation values for {} entries",
            values.len(),
            h.nnz()
        )));
    }
    let mut buckets = vec![Vec::new(); m.usize()];
    for (id, &pos) in h.entries().iter().enumerate() {
        let v = values[id];
        if v >= m.get() {
            return Err(Error::RelocationValue {
                value: v,
                modulus: m.get(),
            });
        }
        buckets[v as usize].push(pos);
    }
    let mut parts = buckets
        .into_iter()
        .map(|b| BinaryMatrix::new(h.n_rows(), h.n_cols(), b))
        .collect::<Result<Vec<_>>>()?;
    let h_prime = parts.remove(0);
    MdParts::new(m, h_prime, parts)
}

/// Assembles the `(M*m) x (M*n)` MD matrix from its parts.
pub fn assemble_md(parts: &MdParts) -> Result<BinaryMatrix> {
    let m = parts.modulus;
    let (rows, cols) = (parts.h_od_prime.n_rows(), parts.h_od_prime.n_cols());
    let mut positions = Vec::new();
    for i in 0..m.usize() {
        for j in 0..m.usize() {
            let part = parts.part(block_index(i, j, m));
            positions.extend(
                part.entries()
                    .iter()
                    .map(|&(r, c)| (i * rows + r, j * cols + c)),
            );
        }
    }
    BinaryMatrix::new(m.usize() * rows, m.usize() * cols, positions)
}

/// Common column weight of the assembled MD matrix, if regular.
pub fn md_column_weight(parts: &MdParts) -> Option<usize> {
    let md = assemble_md(parts).ok()?;
    crate::tanner::check_regular_gamma(&md)
}

/// Assembles the MD matrix of `h` under `map`.
pub fn build_md(
    h: &BinaryMatrix,
    layout: &UnitLayout,
    map: &RelocationMap,
) -> Result<BinaryMatrix> {
    let values = map.entry_values(layout)?;
    assemble_md(&split_matrices(h, &values, map.modulus())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorbing::CanonicalUas;
    use crate::tanner::{build_graph, check_no_4cycles, expand_qc};

    fn m3() -> Modulus {
        Modulus::new(3).unwrap()
    }

    #[test]
    fn modulus_validation() {
        for bad in [0, 1, 2, 4, 9, 15] {
            assert!(Modulus::new(bad).is_err(), "{bad}");
        }
        for good in [3, 5, 7, 11, 13] {
            assert!(Modulus::new(good).is_ok(), "{good}");
        }
    }

    // (c5, v2) and (c5, v4) are entries 8 and 9, (c3, v4) is 5, (c4, v1) is 6.
    fn shifted(entries: &[usize]) -> Vec<u32> {
        let mut v = vec![0; 12];
        for &e in entries {
            v[e] = 1;
        }
        v
    }

    #[test]
    fn shared_and_split_shifts() {
        let u42 = CanonicalUas::by_name("4_2_g3").unwrap();
        let g = build_graph(u42.incidence());
        let u = u42.instance(&g);
        let b = u.cycle_basis(&g).unwrap();
        let blue = &b.cycles()[0];

        let arr1 = shifted(&[8, 9]);
        assert_eq!(alternating_sum(blue, &arr1, m3()), 0);
        assert!(is_uas_active(&u, &b, &arr1, m3()).unwrap());

        let arr2 = shifted(&[5, 6]);
        assert_ne!(alternating_sum(blue, &arr2, m3()), 0);
        assert!(b.cycles().iter().all(|c| !is_cycle_active(c, &arr2, m3())));
        assert!(!is_uas_active(&u, &b, &arr2, m3()).unwrap());

        let zero = vec![0; 12];
        assert!(b
            .cycles()
            .iter()
            .all(|c| alternating_sum(c, &zero, m3()) == 0));
        assert!(is_uas_active(&u, &b, &zero, m3()).unwrap());
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let u42 = CanonicalUas::by_name("4_2_g3").unwrap();
        let g = build_graph(u42.incidence());
        let u = u42.instance(&g);
        let other = crate::cycles::minimum_cycle_basis(&build_graph(
            &BinaryMatrix::from_dense(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).unwrap(),
        ))
        .unwrap();
        assert!(matches!(
            is_uas_active(&u, &other, &[0; 12], m3()),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn split_and_assemble_identity_map() {
        let h = expand_qc(&QcMatrix::array_code(5, 3, 5));
        let parts = split_matrices(&h, &vec![0; h.nnz()], m3()).unwrap();
        assert_eq!(parts.h_od_prime(), &h);
        assert!((1..3).all(|l| parts.aux(l).nnz() == 0));
        let md = assemble_md(&parts).unwrap();
        assert_eq!((md.n_rows(), md.n_cols()), (45, 75));
        // block diagonal
        for &(r, c) in md.entries() {
            assert_eq!(r / 15, c / 25);
        }
        assert_eq!(md_column_weight(&parts), Some(3));
    }

    #[test]
    fn single_relocated_entry() {
        let h = BinaryMatrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap();
        let parts = split_matrices(&h, &[0, 1, 0], m3()).unwrap();
        assert_eq!(parts.aux(1).entries(), &[(0, 1)]);
        assert_eq!(parts.aux(2).nnz(), 0);
        assert_eq!(parts.h_od_prime().entries(), &[(0, 0), (1, 1)]);
        assert!(split_matrices(&h, &[0, 3, 0], m3()).is_err());
        assert!(split_matrices(&h, &[0, 1], m3()).is_err());
    }

    #[test]
    fn x1_blocks_for_m3() {
        let h = BinaryMatrix::identity(1);
        let parts = split_matrices(&h, &[1], m3()).unwrap();
        let md = assemble_md(&parts).unwrap();
        assert_eq!(md.entries(), &[(0, 2), (1, 0), (2, 1)]);
    }

    #[test]
    fn split_shift_parts_on_host() {
        let u42 = CanonicalUas::by_name("4_2_g3").unwrap();
        let parts = split_matrices(u42.incidence(), &shifted(&[5, 6]), m3()).unwrap();
        // (c3, v4) and (c4, v1)
        assert_eq!(parts.aux(1).entries(), &[(2, 3), (3, 0)]);
        let md = assemble_md(&parts).unwrap();
        assert_eq!(crate::tanner::check_regular_gamma(&md), Some(3));
        assert!(check_no_4cycles(&build_graph(&md)));
    }

    #[test]
    fn mismatched_parts_are_rejected() {
        let a = BinaryMatrix::zeros(2, 2);
        let b = BinaryMatrix::zeros(2, 3);
        assert!(MdParts::new(m3(), a.clone(), vec![a.clone(), b]).is_err());
        assert!(MdParts::new(m3(), a.clone(), vec![a]).is_err());
    }

    #[test]
    fn map_text_round_trip_and_errors() {
        let mut map = RelocationMap::new(Modulus::new(5).unwrap(), Granularity::Circulant);
        map.set((0, 1), 3).unwrap();
        map.set((2, 0), 1).unwrap();
        assert!(map.set((0, 0), 5).is_err());
        let text = map.to_text();
        assert_eq!(text, "reloc M=5 granularity=circulant\nc 0 1 3\nc 2 0 1\n");
        assert_eq!(RelocationMap::parse(&text).unwrap(), map);

        assert!(RelocationMap::parse("reloc M=4 granularity=entry\n").is_err());
        assert!(matches!(
            RelocationMap::parse("reloc M=3 granularity=entry\nc 0 0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(RelocationMap::parse("reloc M=3 granularity=entry\ne 0 0 3\n").is_err());
    }

    #[test]
    fn map_on_zero_position_is_an_error() {
        let h = BinaryMatrix::identity(2);
        let mut map = RelocationMap::new(m3(), Granularity::Entry);
        map.set((0, 1), 1).unwrap();
        assert!(matches!(
            map.entry_values(&UnitLayout::entries(&h)),
            Err(Error::ZeroPosition(0, 1))
        ));
    }

    #[test]
    fn circulant_layout_resolves_entries() {
        let q = QcMatrix::array_code(3, 2, 2);
        let h = expand_qc(&q);
        let layout = UnitLayout::circulants(&q, &h);
        assert_eq!(layout.units(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let mut map = RelocationMap::new(m3(), Granularity::Circulant);
        map.set((1, 1), 2).unwrap();
        let values = map.entry_values(&layout).unwrap();
        for (id, &(r, c)) in h.entries().iter().enumerate() {
            let expected = if r >= 3 && c >= 3 { 2 } else { 0 };
            assert_eq!(values[id], expected);
        }
    }
}
