//! Greedy relocation design: vote on relocation values unit by unit until no
//! instance of the target configuration stays active.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::absorbing::{enumerate_uas, involved_units, UasConfig, UasInstance};
use crate::cycles::CycleBasis;
use crate::error::{Error, Result};
use crate::relocation::{
    build_md, is_cycle_active, is_uas_active, Granularity, Modulus, RelocationMap, UnitLayout,
};
use crate::tanner::{
    build_graph, check_no_4cycles, check_regular_gamma, expand_qc, BinaryMatrix, QcMatrix,
};

/// Host code handed to the designer.
#[derive(Debug, Clone)]
pub enum DesignInput {
    Qc(QcMatrix),
    Binary(BinaryMatrix),
}

#[derive(Debug, Clone, Default)]
pub struct DesignOptions {
    /// Relocate single entries of a QC host instead of whole circulants.
    /// Binary hosts always use entries.
    pub entry_granularity: bool,
    /// Skip the warning scan for `(a, d1')` instances with `d1' < d1`.
    pub skip_smaller_scan: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Every instance is inactive.
    NoActive,
    /// No unassigned unit is involved in an active instance.
    NoCandidate,
    /// The selected unit collected no votes.
    NoVotes,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::NoActive => "no_active",
            Termination::NoCandidate => "no_candidate",
            Termination::NoVotes => "no_votes",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignStep {
    pub unit: (usize, usize),
    /// Active instances involving the unit when it was selected.
    pub involvement: usize,
    /// Instances, active or not, that voted.
    pub voters: usize,
    /// Votes for `xi = 1..M-1`.
    pub votes: Vec<usize>,
    pub chosen: Option<u32>,
    pub active_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub config: UasConfig,
    pub modulus: Modulus,
    pub granularity: Granularity,
    /// Instances in the host.
    pub od_instances: usize,
    /// `M * od_instances`, the count without coupling.
    pub initial_md: usize,
    /// Host instances still active at the end.
    pub final_active_od: usize,
    /// `M * final_active_od`: each active instance leaves `M` copies.
    pub final_active: usize,
    pub units_total: usize,
    pub units_relocated: usize,
    pub steps: Vec<DesignStep>,
    /// NZ units in `X_1..X_{M-1}`.
    pub aux_sparsity: Vec<usize>,
    pub warnings: Vec<String>,
    pub termination: Termination,
}

impl DesignReport {
    pub fn relocated_fraction(&self) -> f64 {
        if self.units_total == 0 {
            0.0
        } else {
            self.units_relocated as f64 / self.units_total as f64
        }
    }

    /// Key/value summary, a blank line, then one row per step.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(s, "key\tvalue");
        let _ = writeln!(s, "config\t{}", self.config.label());
        let _ = writeln!(s, "M\t{}", self.modulus);
        let _ = writeln!(s, "granularity\t{}", self.granularity);
        let _ = writeln!(s, "od_instances\t{}", self.od_instances);
        let _ = writeln!(s, "initial_md\t{}", self.initial_md);
        let _ = writeln!(s, "final_active_od\t{}", self.final_active_od);
        let _ = writeln!(s, "final_active\t{}", self.final_active);
        let _ = writeln!(s, "units_total\t{}", self.units_total);
        let _ = writeln!(s, "units_relocated\t{}", self.units_relocated);
        let _ = writeln!(s, "relocated_fraction\t{:.4}", self.relocated_fraction());
        let _ = writeln!(s, "aux_sparsity\t{}", join(&self.aux_sparsity));
        let _ = writeln!(s, "termination\t{}", self.termination);
        for w in &self.warnings {
            let _ = writeln!(s, "warning\t{w}");
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "step\tunit_row\tunit_col\tinvolvement\tvoters\tvotes\tchosen\tactive_after"
        );
        for (i, st) in self.steps.iter().enumerate() {
            let chosen = st.chosen.map_or("-".to_string(), |x| x.to_string());
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                st.unit.0,
                st.unit.1,
                st.involvement,
                st.voters,
                join(&st.votes),
                chosen,
                st.active_after
            );
        }
        s
    }
}

/// Bookkeeping of one design run.
#[derive(Debug, Clone)]
pub struct DesignState {
    modulus: Modulus,
    layout: UnitLayout,
    values: Vec<u32>,
    assigned: Vec<Option<u32>>,
    instances: Vec<UasInstance>,
    bases: Vec<CycleBasis>,
    involved: Vec<BTreeSet<usize>>,
    active: Vec<bool>,
    aux_sparsity: Vec<usize>,
}

impl DesignState {
    /// All units unassigned, so every instance starts active.
    pub fn new(
        layout: UnitLayout,
        instances: Vec<UasInstance>,
        bases: Vec<CycleBasis>,
        modulus: Modulus,
    ) -> Result<Self> {
        let involved = instances
            .iter()
            .map(|u| involved_units(u, &layout))
            .collect::<Result<Vec<_>>>()?;
        let mut s = Self {
            modulus,
            values: vec![0; layout.entry_count()],
            assigned: vec![None; layout.units().len()],
            active: vec![true; instances.len()],
            aux_sparsity: vec![0; modulus.usize() - 1],
            layout,
            instances,
            bases,
            involved,
        };
        s.refresh()?;
        Ok(s)
    }

    pub fn layout(&self) -> &UnitLayout {
        &self.layout
    }

    pub fn instances(&self) -> &[UasInstance] {
        &self.instances
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Per-entry relocation values; unassigned entries are 0.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn aux_sparsity(&self) -> &[usize] {
        &self.aux_sparsity
    }

    pub fn is_assigned(&self, unit: usize) -> bool {
        self.assigned[unit].is_some()
    }

    /// Active instances involving each unit.
    pub fn involvement(&self) -> Vec<usize> {
        let mut counts = vec![0; self.layout.units().len()];
        for (i, units) in self.involved.iter().enumerate() {
            if self.active[i] {
                for &u in units {
                    counts[u] += 1;
                }
            }
        }
        counts
    }

    /// Fixes `unit` to `xi` (nonzero) on all its entries and re-evaluates
    /// every instance.
    pub fn assign(&mut self, unit: usize, xi: u32) -> Result<()> {
        if xi == 0 || xi >= self.modulus.get() {
            return Err(Error::RelocationValue {
                value: xi,
                modulus: self.modulus.get(),
            });
        }
        if self.assigned[unit].is_some() {
            return Err(Error::Internal(format!("unit {unit} assigned twice")));
        }
        for &e in self.layout.members(unit) {
            self.values[e] = xi;
        }
        self.assigned[unit] = Some(xi);
        self.aux_sparsity[xi as usize - 1] += 1;
        self.refresh()
    }

    /// Recomputes every active flag from scratch.
    fn refresh(&mut self) -> Result<()> {
        let values = &self.values;
        let m = self.modulus;
        self.active = self
            .instances
            .par_iter()
            .zip(&self.bases)
            .map(|(u, b)| is_uas_active(u, b, values, m))
            .collect::<Result<_>>()?;
        Ok(())
    }

    pub fn to_map(&self) -> Result<RelocationMap> {
        let mut map = RelocationMap::new(self.modulus, self.layout.granularity());
        for (u, v) in self.assigned.iter().enumerate() {
            if let Some(v) = v {
                map.set(self.layout.units()[u], *v)?;
            }
        }
        Ok(map)
    }
}

/// Decisions `xi in 1..M-1` that, applied to every entry of `unit` with all
/// other values held, make at least one basic cycle of instance `inst`
/// inactive. Empty if the instance does not involve the unit.
pub fn vote(state: &DesignState, inst: usize, unit: usize) -> BTreeSet<u32> {
    if !state.involved[inst].contains(&unit) {
        return BTreeSet::new();
    }
    let mut values = state.values.clone();
    (1..state.modulus.get())
        .filter(|&xi| {
            for &e in state.layout.members(unit) {
                values[e] = xi;
            }
            state.bases[inst]
                .cycles()
                .iter()
                .any(|c| !is_cycle_active(c, &values, state.modulus))
        })
        .collect()
}

/// Unassigned unit with the most active instances involving it; ties go to
/// the smallest unit key. `None` once no such unit has a positive count.
pub fn select_circulant(state: &DesignState) -> Option<usize> {
    let counts = state.involvement();
    let mut best: Option<usize> = None;
    for (u, &n) in counts.iter().enumerate() {
        if n == 0 || state.is_assigned(u) {
            continue;
        }
        if best.is_none_or(|b| n > counts[b]) {
            best = Some(u);
        }
    }
    best
}

/// Runs the greedy design. Returns the MD matrix, the relocation map and the
/// report.
pub fn design_md(
    input: &DesignInput,
    m: Modulus,
    c: &UasConfig,
    opts: &DesignOptions,
) -> Result<(BinaryMatrix, RelocationMap, DesignReport)> {
    c.validate()?;
    let (h, layout) = match input {
        DesignInput::Qc(q) => {
            let h = expand_qc(q);
            let layout = if opts.entry_granularity {
                UnitLayout::entries(&h)
            } else {
                UnitLayout::circulants(q, &h)
            };
            (h, layout)
        }
        DesignInput::Binary(h) => (h.clone(), UnitLayout::entries(h)),
    };
    let found = check_regular_gamma(&h);
    if found != Some(c.gamma) {
        return Err(Error::GammaMismatch {
            expected: c.gamma,
            found,
        });
    }
    let g = build_graph(&h);
    let mut warnings = Vec::new();
    if !check_no_4cycles(&g) {
        warnings.push("host has cycles of length 4".to_string());
    }
    if !opts.skip_smaller_scan {
        for d1 in (0..c.d1).filter(|d| (c.a * c.gamma - d).is_multiple_of(2)) {
            let smaller = UasConfig { d1, ..*c };
            if smaller.validate().is_err() {
                continue;
            }
            let n = enumerate_uas(&g, &smaller).len();
            if n > 0 {
                warnings.push(format!("host has {n} ({}, {d1}) instances", c.a));
            }
        }
    }

    let instances = enumerate_uas(&g, c);
    let bases = instances
        .par_iter()
        .map(|u| u.cycle_basis(&g))
        .collect::<Result<Vec<_>>>()?;
    let units_total = layout.units().len();
    let mut state = DesignState::new(layout, instances, bases, m)?;
    let mut steps = Vec::new();

    let termination = loop {
        if state.active_count() == 0 {
            break Termination::NoActive;
        }
        if steps.len() >= units_total {
            return Err(Error::Internal(
                "design loop exceeded the unit count".into(),
            ));
        }
        let Some(unit) = select_circulant(&state) else {
            break Termination::NoCandidate;
        };
        let involvement = state.involvement()[unit];
        let voters: Vec<usize> = (0..state.instances.len())
            .filter(|&i| state.involved[i].contains(&unit))
            .collect();
        let mut votes = vec![0usize; m.usize() - 1];
        for ballot in voters
            .par_iter()
            .map(|&i| vote(&state, i, unit))
            .collect::<Vec<_>>()
        {
            for xi in ballot {
                votes[xi as usize - 1] += 1;
            }
        }
        let top = votes.iter().copied().max().unwrap_or(0);
        let chosen = (top > 0).then(|| {
            (1..m.get())
                .filter(|&xi| votes[xi as usize - 1] == top)
                .min_by_key(|&xi| (state.aux_sparsity[xi as usize - 1], xi))
                .expect("nonempty winner set")
        });
        if let Some(xi) = chosen {
            state.assign(unit, xi)?;
        }
        steps.push(DesignStep {
            unit: state.layout.units()[unit],
            involvement,
            voters: voters.len(),
            votes,
            chosen,
            active_after: state.active_count(),
        });
        if chosen.is_none() {
            break Termination::NoVotes;
        }
    };

    let map = state.to_map()?;
    let h_md = build_md(&h, &state.layout, &map)?;
    let report = DesignReport {
        config: *c,
        modulus: m,
        granularity: state.layout.granularity(),
        od_instances: state.instances.len(),
        initial_md: m.usize() * state.instances.len(),
        final_active_od: state.active_count(),
        final_active: m.usize() * state.active_count(),
        units_total,
        units_relocated: map.relocated_units(),
        steps,
        aux_sparsity: state.aux_sparsity.clone(),
        warnings,
        termination,
    };
    Ok((h_md, map, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorbing::CanonicalUas;
    use crate::oracle::enumerate_md_uas;
    use crate::relocation::block_index;

    fn m(x: u32) -> Modulus {
        Modulus::new(x).unwrap()
    }

    fn canonical_state() -> (DesignState, BinaryMatrix) {
        let c = CanonicalUas::by_name("4_2_g3").unwrap();
        let h = c.incidence().clone();
        let g = build_graph(&h);
        let u = c.instance(&g);
        let b = u.cycle_basis(&g).unwrap();
        let state = DesignState::new(UnitLayout::entries(&h), vec![u], vec![b], m(3)).unwrap();
        (state, h)
    }

    /// `p` disjoint copies of the (4, 2) UAS, one circulant per edge.
    fn toy_qc(p: usize) -> QcMatrix {
        let h = CanonicalUas::by_name("4_2_g3").unwrap().incidence().clone();
        QcMatrix::new(
            p,
            h.n_rows(),
            h.n_cols(),
            h.entries().iter().map(|&e| (e, 0)).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn single_c5_entry_gets_both_votes() {
        let (state, h) = canonical_state();
        let unit = state.layout().unit_index((4, 1)).unwrap();
        assert_eq!(h.entry_id(4, 1), Some(8));
        assert_eq!(vote(&state, 0, unit), BTreeSet::from([1, 2]));
    }

    #[test]
    fn shifting_both_c5_entries_breaks_nothing() {
        let c = CanonicalUas::by_name("4_2_g3").unwrap();
        let h = c.incidence().clone();
        let g = build_graph(&h);
        let u = c.instance(&g);
        let b = u.cycle_basis(&g).unwrap();
        let mut values = vec![0; h.nnz()];
        for xi in 1..3 {
            values[8] = xi;
            values[9] = xi;
            assert!(b
                .cycles()
                .iter()
                .all(|cy| is_cycle_active(cy, &values, m(3))));
        }
    }

    #[test]
    fn selection_tie_breaks_by_key() {
        let (state, _) = canonical_state();
        // every degree-2 entry is involved once; the smallest key wins
        assert_eq!(select_circulant(&state), Some(0));
        let mut s = state.clone();
        s.assign(0, 1).unwrap();
        assert_eq!(s.active_count(), 0);
        assert_eq!(select_circulant(&s), None);
    }

    #[test]
    fn instance_free_host_gives_block_diagonal() {
        let h = CanonicalUas::by_name("4_2_g3").unwrap().incidence().clone();
        let c = UasConfig::new(4, 0, 3).unwrap();
        let (md, map, report) = design_md(
            &DesignInput::Binary(h.clone()),
            m(3),
            &c,
            &DesignOptions::default(),
        )
        .unwrap();
        assert_eq!(map.relocated_units(), 0);
        assert_eq!(report.termination, Termination::NoActive);
        for &(r, col) in md.entries() {
            assert_eq!(r / h.n_rows(), col / h.n_cols());
        }
        assert_eq!(md.nnz(), 3 * h.nnz());
    }

    #[test]
    fn toy_host_is_cleared() {
        let c = UasConfig::new(4, 2, 3).unwrap();
        let (md, map, report) = design_md(
            &DesignInput::Qc(toy_qc(3)),
            m(3),
            &c,
            &DesignOptions::default(),
        )
        .unwrap();
        assert_eq!(report.od_instances, 3);
        assert_eq!(report.initial_md, 9);
        assert_eq!(report.final_active, 0);
        assert_eq!(report.termination, Termination::NoActive);
        assert_eq!(map.relocated_units(), 1);
        assert_eq!(enumerate_md_uas(&md, &c), 0);
        assert_eq!(check_regular_gamma(&md), Some(3));
    }

    #[test]
    fn gamma_mismatch_is_an_error() {
        let c = UasConfig::new(4, 4, 4).unwrap();
        let err = design_md(
            &DesignInput::Qc(toy_qc(2)),
            m(3),
            &c,
            &DesignOptions::default(),
        );
        assert!(matches!(
            err,
            Err(Error::GammaMismatch {
                expected: 4,
                found: Some(3)
            })
        ));
    }

    #[test]
    fn array_code_closure() {
        let q = QcMatrix::array_code(7, 3, 7);
        let c = UasConfig::new(4, 2, 3).unwrap();
        let (md, map, report) = design_md(
            &DesignInput::Qc(q.clone()),
            m(3),
            &c,
            &DesignOptions::default(),
        )
        .unwrap();
        assert!(report.od_instances > 0);
        assert_eq!(report.final_active, enumerate_md_uas(&md, &c));
        assert!(report.final_active <= report.initial_md);
        assert_eq!(check_regular_gamma(&md), Some(3));
        assert!(check_no_4cycles(&build_graph(&md)));
        let (md2, map2, _) =
            design_md(&DesignInput::Qc(q), m(3), &c, &DesignOptions::default()).unwrap();
        assert_eq!((md, map), (md2, map2));
        assert_eq!(block_index(0, 1, m(3)), 2);
    }
}
