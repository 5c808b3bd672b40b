//! Deciding whether two granular distributions admit a common
//! conflict-free parent relation.
//!
//! Existence of such a parent is equivalent to the existence of a joint
//! mass matrix with the two distributions as marginals, supported only
//! on focal pairs with nonempty intersection — a transportation
//! feasibility problem with forbidden cells. After clearing denominators
//! this is decided exactly by integer max-flow: feasible iff the flow
//! saturates the total supply. The test decides the definition itself,
//! for arbitrary (not only disjoint) granules.
//!
//! A feasible answer comes with a constructive witness: the joint
//! assignment and a synthesized parent relation whose two column
//! summaries reproduce the inputs. An infeasible answer comes with a
//! violating-set certificate — a set of focals whose total mass strictly
//! exceeds the total mass of everything it can possibly sit with on the
//! other side — extracted from a minimum cut.
//!
//! [`gale_oracle`] is the direct exponential test used to cross-check
//! the flow decision on small instances.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::distribution::GranularDistribution;
use crate::error::{Error, Result};
use crate::frame::Granule;
use crate::flow::FlowNetwork;
use crate::rational::Rational;
use crate::relation::GranularRelation;

/// Which input distribution supplies a violating set or triggering
/// granule: `G` is the first argument, `H` the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    G,
    H,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::G => "G",
            Side::H => "H",
        }
    }
}

/// Outcome of the quick sufficient (but not necessary) test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SufficiencyVerdict {
    /// Some focal of one side is disjoint from every focal of the other;
    /// the first such granule in canonical order is reported.
    Triggered { side: Side, focal_index: usize },
    NotTriggered,
}

impl SufficiencyVerdict {
    pub fn is_triggered(&self) -> bool {
        matches!(self, SufficiencyVerdict::Triggered { .. })
    }
}

/// Nonnegative joint masses over G × H focal pairs with the inputs as
/// exact marginals and zero mass on disjoint pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointAssignment {
    masses: Vec<Vec<Rational>>,
}

impl JointAssignment {
    pub fn mass(&self, i: usize, j: usize) -> &Rational {
        &self.masses[i][j]
    }

    pub fn rows(&self) -> usize {
        self.masses.len()
    }

    pub fn cols(&self) -> usize {
        self.masses.first().map_or(0, Vec::len)
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.masses.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        (0..self.cols())
            .map(|j| self.masses.iter().map(|row| &row[j]).sum())
            .collect()
    }

    /// Positive entries as (i, j, mass) triples in canonical order.
    pub fn support(&self) -> Vec<(usize, usize, &Rational)> {
        let mut out = Vec::new();
        for (i, row) in self.masses.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                if m.is_positive() {
                    out.push((i, j, m));
                }
            }
        }
        out
    }
}

/// Proof that no joint assignment exists: a set S of focals on one side
/// whose mass strictly exceeds the total mass of the other side's
/// granules that intersect anything in S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub side: Side,
    /// Focal indices of S on that side, ascending.
    pub indices: Vec<usize>,
    pub supply: Rational,
    pub reachable_demand: Rational,
}

impl InfeasibilityCertificate {
    /// The literal rational comparison that makes this a certificate.
    pub fn is_valid(&self) -> bool {
        self.supply > self.reachable_demand
    }
}

/// Answer of the exact combinability decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible {
        joint: JointAssignment,
        /// A parent relation realizing the joint assignment: columns
        /// "s1" and "s2" summarize back to G and H exactly.
        witness: GranularRelation,
    },
    Infeasible {
        certificate: InfeasibilityCertificate,
    },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

/// Verdict of the definition-level subset test. Deliberately carries no
/// witness: the oracle decides, the flow path constructs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaleVerdict {
    Feasible,
    Infeasible {
        certificate: InfeasibilityCertificate,
    },
}

impl GaleVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, GaleVerdict::Feasible)
    }

    pub fn agrees_with(&self, result: &FeasibilityResult) -> bool {
        self.is_feasible() == result.is_feasible()
    }
}

/// Knobs for [`combinable_with`]. `extra_scale` multiplies the integer
/// scaling denominator; the verdict and the reduced witness must not
/// depend on it, which the test suite exercises.
#[derive(Debug, Clone)]
pub struct CombinableOptions {
    pub witness_row_cap: u64,
    pub extra_scale: u64,
}

impl Default for CombinableOptions {
    fn default() -> Self {
        CombinableOptions {
            witness_row_cap: 1_000_000,
            extra_scale: 1,
        }
    }
}

fn check_frames(g: &GranularDistribution, h: &GranularDistribution) -> Result<()> {
    if g.frame() != h.frame() {
        return Err(Error::FrameMismatch);
    }
    Ok(())
}

/// Quick test: is some focal of G disjoint from every focal of H, or
/// vice-versa? Triggering proves noncombinability; not triggering proves
/// nothing (see the crate's counterexample tests).
pub fn sufficient_noncombinable(
    g: &GranularDistribution,
    h: &GranularDistribution,
) -> Result<SufficiencyVerdict> {
    check_frames(g, h)?;
    let isolated = |focals: &[(Granule, Rational)], others: &[(Granule, Rational)]| {
        focals.iter().position(|(a, _)| {
            others.iter().all(|(b, _)| a.bits() & b.bits() == 0)
        })
    };
    if let Some(i) = isolated(g.focal(), h.focal()) {
        return Ok(SufficiencyVerdict::Triggered {
            side: Side::G,
            focal_index: i,
        });
    }
    if let Some(j) = isolated(h.focal(), g.focal()) {
        return Ok(SufficiencyVerdict::Triggered {
            side: Side::H,
            focal_index: j,
        });
    }
    Ok(SufficiencyVerdict::NotTriggered)
}

/// Denominator-clearing factor: the least common multiple of every
/// mass denominator in both distributions.
fn common_denominator(g: &GranularDistribution, h: &GranularDistribution) -> BigUint {
    let mut d = BigUint::one();
    for (_, m) in g.focal().iter().chain(h.focal()) {
        let den = m
            .denom()
            .to_biguint()
            .expect("denominators are positive");
        d = d.lcm(&den);
    }
    d
}

/// `scale * mass` as an exact nonnegative integer; `scale` must be a
/// multiple of the mass denominator.
fn scaled_mass(mass: &Rational, scale: &BigUint) -> BigUint {
    let den = mass.denom().to_biguint().expect("positive denominator");
    let num = mass.numer().to_biguint().expect("nonnegative numerator");
    (scale / den) * num
}

/// Decides combinability with default options.
pub fn combinable(g: &GranularDistribution, h: &GranularDistribution) -> Result<FeasibilityResult> {
    combinable_with(g, h, &CombinableOptions::default())
}

/// Exact decision by integer max-flow.
///
/// All masses are scaled by the common denominator D to integers; the
/// network routes D units from a source through the G focals, across
/// arcs for intersecting pairs, through the H focals into a sink.
/// Feasible iff the max flow equals D. Arc flows divided by D form the
/// joint assignment; a saturated minimum cut yields the certificate.
pub fn combinable_with(
    g: &GranularDistribution,
    h: &GranularDistribution,
    options: &CombinableOptions,
) -> Result<FeasibilityResult> {
    check_frames(g, h)?;
    let m = g.len();
    let n = h.len();
    let scale = common_denominator(g, h) * BigUint::from(options.extra_scale.max(1));

    // Node layout: source, m supply nodes, n demand nodes, sink.
    let source = 0;
    let sink = m + n + 1;
    let mut net = FlowNetwork::new(m + n + 2);
    for (i, (_, p)) in g.focal().iter().enumerate() {
        net.add_edge(source, 1 + i, scaled_mass(p, &scale));
    }
    let mut pair_edges: Vec<(usize, usize, crate::flow::EdgeId)> = Vec::new();
    for (i, (a, _)) in g.focal().iter().enumerate() {
        for (j, (b, _)) in h.focal().iter().enumerate() {
            if a.bits() & b.bits() != 0 {
                let e = net.add_edge(1 + i, 1 + m + j, scale.clone());
                pair_edges.push((i, j, e));
            }
        }
    }
    for (j, (_, q)) in h.focal().iter().enumerate() {
        net.add_edge(1 + m + j, sink, scaled_mass(q, &scale));
    }

    let flow = net.max_flow(source, sink);
    if flow == scale {
        let scale_int = BigInt::from(scale.clone());
        let mut masses = vec![vec![Rational::zero(); n]; m];
        let mut flows: Vec<(usize, usize, BigUint)> = Vec::new();
        for &(i, j, e) in &pair_edges {
            let f = net.flow_on(e).clone();
            if !f.is_zero() {
                masses[i][j] = Rational::from_bigint_ratio(BigInt::from(f.clone()), scale_int.clone());
                flows.push((i, j, f));
            }
        }
        let joint = JointAssignment { masses };
        let witness = build_witness(g, h, &scale, &flows, options.witness_row_cap)?;
        debug_assert!(
            verify_parent(&witness, "s1", "s2", g, h).unwrap_or(false),
            "constructed witness must verify"
        );
        Ok(FeasibilityResult::Feasible { joint, witness })
    } else {
        let reachable = net.residual_reachable(source);
        let indices: Vec<usize> = (0..m).filter(|i| reachable[1 + i]).collect();
        let certificate = certificate_for(g, h, &indices);
        debug_assert!(certificate.is_valid(), "cut must yield a strict violation");
        Ok(FeasibilityResult::Infeasible { certificate })
    }
}

/// Supply/demand certificate for a G-side index set.
fn certificate_for(
    g: &GranularDistribution,
    h: &GranularDistribution,
    indices: &[usize],
) -> InfeasibilityCertificate {
    let supply: Rational = indices.iter().map(|&i| &g.focal()[i].1).sum();
    let mut neighborhood = 0u64;
    for &i in indices {
        neighborhood |= g.focal()[i].0.bits();
    }
    let reachable_demand: Rational = h
        .focal()
        .iter()
        .filter(|(b, _)| b.bits() & neighborhood != 0)
        .map(|(_, q)| q)
        .sum();
    InfeasibilityCertificate {
        side: Side::G,
        indices: indices.to_vec(),
        supply,
        reachable_demand,
    }
}

/// Materializes a parent relation from integer pair flows: after gcd
/// reduction, `flow/gcd` rows carry cells (A_i, B_j) in columns
/// "s1"/"s2". Row ids are "r1", "r2", ...
fn build_witness(
    g: &GranularDistribution,
    h: &GranularDistribution,
    scale: &BigUint,
    flows: &[(usize, usize, BigUint)],
    row_cap: u64,
) -> Result<GranularRelation> {
    let mut gcd = BigUint::zero();
    for (_, _, f) in flows {
        gcd = gcd.gcd(f);
    }
    debug_assert!(!gcd.is_zero(), "a feasible instance has positive flow");
    let total_rows = scale / &gcd;
    if total_rows > BigUint::from(row_cap) {
        return Err(Error::WitnessTooLarge {
            rows: total_rows,
            cap: row_cap,
        });
    }
    let mut rows = Vec::new();
    let mut next_id = 1usize;
    for (i, j, f) in flows {
        let copies = (f / &gcd).to_u64().expect("row count fits after cap check");
        for _ in 0..copies {
            rows.push((
                format!("r{next_id}"),
                vec![g.focal()[*i].0.clone(), h.focal()[*j].0.clone()],
            ));
            next_id += 1;
        }
    }
    GranularRelation::new(
        g.frame().clone(),
        vec!["s1".to_string(), "s2".to_string()],
        rows,
    )
}

/// Default focal-count cap for the exponential oracle.
pub const GALE_ORACLE_CAP: usize = 15;

/// Direct test from the definition: feasible iff every subset S of G's
/// focals has supply Σ p_i no larger than the total mass of H's granules
/// intersecting S. Exponential in the number of G focals, so capped; on
/// infeasibility the maximally violating S is returned.
pub fn gale_oracle(g: &GranularDistribution, h: &GranularDistribution) -> Result<GaleVerdict> {
    gale_oracle_with_cap(g, h, GALE_ORACLE_CAP)
}

pub fn gale_oracle_with_cap(
    g: &GranularDistribution,
    h: &GranularDistribution,
    cap: usize,
) -> Result<GaleVerdict> {
    check_frames(g, h)?;
    assert!(cap <= 63, "oracle cap must stay within subset-mask range");
    let m = g.len();
    let n = h.len();
    if m > cap || n > cap {
        return Err(Error::OracleTooLarge { got: m.max(n), cap });
    }

    // For each G focal, the mask of H focals it intersects.
    let neighbor_masks: Vec<u64> = g
        .focal()
        .iter()
        .map(|(a, _)| {
            h.focal()
                .iter()
                .enumerate()
                .filter(|(_, (b, _))| a.bits() & b.bits() != 0)
                .fold(0u64, |acc, (j, _)| acc | (1 << j))
        })
        .collect();

    let mut worst: Option<(Rational, u64, Rational, Rational)> = None;
    for subset in 1u64..(1u64 << m) {
        let mut supply = Rational::zero();
        let mut neighbors = 0u64;
        for (i, (_, p)) in g.focal().iter().enumerate() {
            if subset & (1 << i) != 0 {
                supply = supply + p;
                neighbors |= neighbor_masks[i];
            }
        }
        let mut demand = Rational::zero();
        for (j, (_, q)) in h.focal().iter().enumerate() {
            if neighbors & (1 << j) != 0 {
                demand = demand + q;
            }
        }
        if supply > demand {
            let violation = &supply - &demand;
            let better = match &worst {
                None => true,
                Some((best, _, _, _)) => violation > *best,
            };
            if better {
                worst = Some((violation, subset, supply, demand));
            }
        }
    }

    match worst {
        None => Ok(GaleVerdict::Feasible),
        Some((_, subset, supply, reachable_demand)) => {
            let indices = (0..m).filter(|i| subset & (1 << i) != 0).collect();
            Ok(GaleVerdict::Infeasible {
                certificate: InfeasibilityCertificate {
                    side: Side::G,
                    indices,
                    supply,
                    reachable_demand,
                },
            })
        }
    }
}

/// Definition-level check of a claimed parent: conflict-free on the two
/// columns and summarizing back to exactly G and H.
pub fn verify_parent(
    rel: &GranularRelation,
    col_x: &str,
    col_y: &str,
    g: &GranularDistribution,
    h: &GranularDistribution,
) -> Result<bool> {
    let verdict = rel.conflict_free(col_x, col_y)?;
    if !verdict.is_conflict_free() {
        return Ok(false);
    }
    Ok(rel.summarize(col_x)? == *g && rel.summarize(col_y)? == *h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;

    fn ab() -> Frame {
        Frame::new(["a", "b"]).unwrap()
    }

    fn abc() -> Frame {
        Frame::new(["a", "b", "c"]).unwrap()
    }

    fn dist(f: &Frame, entries: &[(&[&str], &str)]) -> GranularDistribution {
        GranularDistribution::from_entries(f, entries).unwrap()
    }

    fn counterexample() -> (GranularDistribution, GranularDistribution) {
        let f = ab();
        (
            dist(&f, &[(&["a"], "2/3"), (&["b"], "1/3")]),
            dist(&f, &[(&["a"], "1/3"), (&["b"], "2/3")]),
        )
    }

    #[test]
    fn counterexample_is_infeasible_with_exact_certificate() {
        let (g, h) = counterexample();
        match combinable(&g, &h).unwrap() {
            FeasibilityResult::Infeasible { certificate } => {
                assert_eq!(certificate.side, Side::G);
                assert_eq!(certificate.indices, vec![0]); // {a}, mass 2/3
                assert_eq!(certificate.supply, Rational::new(2, 3).unwrap());
                assert_eq!(certificate.reachable_demand, Rational::new(1, 3).unwrap());
                assert!(certificate.is_valid());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn counterexample_defeats_the_sufficient_condition() {
        // Shared granules on both sides, so the quick test stays silent,
        // yet the exact decision is infeasible.
        let (g, h) = counterexample();
        assert_eq!(
            sufficient_noncombinable(&g, &h).unwrap(),
            SufficiencyVerdict::NotTriggered
        );
        assert!(!combinable(&g, &h).unwrap().is_feasible());
    }

    #[test]
    fn conflict_below_one_does_not_imply_combinable() {
        // The combination rule happily normalizes this pair (K = 5/9),
        // yet no conflict-free parent exists: K < 1 is necessary for
        // combinability, never sufficient.
        let (g, h) = counterexample();
        let k = crate::combination::conflict_mass(&g, &h).unwrap();
        assert_eq!(k, Rational::new(5, 9).unwrap());
        assert!(k < Rational::one());
        assert!(!combinable(&g, &h).unwrap().is_feasible());
    }

    #[test]
    fn identical_disjoint_singletons_pair_diagonally() {
        let f = ab();
        let g = dist(&f, &[(&["a"], "1/2"), (&["b"], "1/2")]);
        match combinable(&g, &g).unwrap() {
            FeasibilityResult::Feasible { joint, witness } => {
                assert_eq!(*joint.mass(0, 0), Rational::new(1, 2).unwrap());
                assert_eq!(*joint.mass(1, 1), Rational::new(1, 2).unwrap());
                assert!(joint.mass(0, 1).is_zero());
                assert!(joint.mass(1, 0).is_zero());
                assert_eq!(witness.row_count(), 2);
                assert!(verify_parent(&witness, "s1", "s2", &g, &g).unwrap());
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn vacuous_partner_absorbs_any_supply() {
        let f = abc();
        let g = dist(&f, &[(&["a"], "1/6"), (&["b", "c"], "1/2"), (&["c"], "1/3")]);
        let h = GranularDistribution::vacuous(&f);
        match combinable(&g, &h).unwrap() {
            FeasibilityResult::Feasible { joint, witness } => {
                for (i, (_, p)) in g.focal().iter().enumerate() {
                    assert_eq!(joint.mass(i, 0), p);
                }
                assert!(verify_parent(&witness, "s1", "s2", &g, &h).unwrap());
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn marginals_and_support_hold_on_feasible_output() {
        let f = abc();
        let g = dist(&f, &[(&["a"], "1/2"), (&["a", "b"], "1/2")]);
        let h = dist(&f, &[(&["b"], "2/5"), (&["a", "b", "c"], "3/5")]);
        match combinable(&g, &h).unwrap() {
            FeasibilityResult::Feasible { joint, witness } => {
                let rows = joint.row_sums();
                let cols = joint.col_sums();
                for (i, (_, p)) in g.focal().iter().enumerate() {
                    assert_eq!(&rows[i], p);
                }
                for (j, (_, q)) in h.focal().iter().enumerate() {
                    assert_eq!(&cols[j], q);
                }
                for (i, j, m) in joint.support() {
                    assert!(m.is_positive());
                    assert_ne!(g.focal()[i].0.bits() & h.focal()[j].0.bits(), 0);
                }
                assert!(verify_parent(&witness, "s1", "s2", &g, &h).unwrap());
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn sufficient_condition_triggers_on_isolated_granule() {
        let f = abc();
        let g = dist(&f, &[(&["c"], "1/2"), (&["a"], "1/2")]);
        let h = dist(&f, &[(&["a"], "1/2"), (&["b"], "1/2")]);
        // {c} is disjoint from both {a} and {b}; canonical order puts
        // {a} (bit 0) before {c}, so the triggering index is 1.
        assert_eq!(
            sufficient_noncombinable(&g, &h).unwrap(),
            SufficiencyVerdict::Triggered {
                side: Side::G,
                focal_index: 1
            }
        );
        // And the exact decision agrees, per the implication chain.
        assert!(!combinable(&g, &h).unwrap().is_feasible());
    }

    #[test]
    fn sufficient_condition_reports_the_h_side_too() {
        let f = abc();
        let g = dist(&f, &[(&["a"], "1/2"), (&["b"], "1/2")]);
        let h = dist(&f, &[(&["a", "b"], "1/2"), (&["c"], "1/2")]);
        assert_eq!(
            sufficient_noncombinable(&g, &h).unwrap(),
            SufficiencyVerdict::Triggered {
                side: Side::H,
                focal_index: 1
            }
        );
    }

    #[test]
    fn vacuous_partner_never_triggers() {
        let f = abc();
        let g = dist(&f, &[(&["a"], "1/3"), (&["b"], "2/3")]);
        let h = GranularDistribution::vacuous(&f);
        assert_eq!(
            sufficient_noncombinable(&g, &h).unwrap(),
            SufficiencyVerdict::NotTriggered
        );
    }

    #[test]
    fn oracle_agrees_on_the_counterexample() {
        let (g, h) = counterexample();
        match gale_oracle(&g, &h).unwrap() {
            GaleVerdict::Infeasible { certificate } => {
                assert_eq!(certificate.indices, vec![0]);
                assert_eq!(certificate.supply, Rational::new(2, 3).unwrap());
                assert_eq!(certificate.reachable_demand, Rational::new(1, 3).unwrap());
            }
            GaleVerdict::Feasible => panic!("oracle must reject the counterexample"),
        }
    }

    #[test]
    fn oracle_accepts_intersecting_singletons() {
        let f = ab();
        let g = dist(&f, &[(&["a", "b"], "1")]);
        let h = dist(&f, &[(&["a"], "1")]);
        assert!(gale_oracle(&g, &h).unwrap().is_feasible());
        assert!(combinable(&g, &h).unwrap().is_feasible());
    }

    #[test]
    fn overlapping_pair_that_still_fails() {
        // Not the quick test, and not combinability: {a} holds 2/3 but
        // can only sit with H's {a}, which holds 1/3.
        let f = ab();
        let g = dist(&f, &[(&["a"], "2/3"), (&["a", "b"], "1/3")]);
        let h = dist(&f, &[(&["b"], "2/3"), (&["a"], "1/3")]);
        assert_eq!(
            sufficient_noncombinable(&g, &h).unwrap(),
            SufficiencyVerdict::NotTriggered
        );
        let flow = combinable(&g, &h).unwrap();
        let oracle = gale_oracle(&g, &h).unwrap();
        assert!(!flow.is_feasible());
        assert!(oracle.agrees_with(&flow));
        match oracle {
            GaleVerdict::Infeasible { certificate } => {
                assert_eq!(certificate.indices, vec![0]);
                assert_eq!(certificate.supply, Rational::new(2, 3).unwrap());
                assert_eq!(certificate.reachable_demand, Rational::new(1, 3).unwrap());
            }
            GaleVerdict::Feasible => unreachable!(),
        }
    }

    #[test]
    fn oracle_cap_is_enforced() {
        let labels: Vec<String> = (0..20).map(|i| format!("e{i}")).collect();
        let f = Frame::new(labels.clone()).unwrap();
        let entries: Vec<(Granule, Rational)> = labels
            .iter()
            .map(|l| {
                (
                    f.granule([l.as_str()]).unwrap(),
                    Rational::new(1, 20).unwrap(),
                )
            })
            .collect();
        let d = GranularDistribution::new(f.clone(), entries).unwrap();
        assert!(matches!(
            gale_oracle(&d, &d),
            Err(Error::OracleTooLarge { got: 20, .. })
        ));
    }

    #[test]
    fn verify_parent_rejects_tampering_but_not_reordering() {
        let f = ab();
        let g = dist(&f, &[(&["a"], "1/2"), (&["b"], "1/2")]);
        let witness = match combinable(&g, &g).unwrap() {
            FeasibilityResult::Feasible { witness, .. } => witness,
            _ => panic!("feasible"),
        };
        assert!(verify_parent(&witness, "s1", "s2", &g, &g).unwrap());

        // Swap the two rows: still a valid parent.
        let mut swapped: Vec<(String, Vec<Granule>)> = witness
            .rows()
            .iter()
            .map(|r| (r.id().to_string(), r.cells().to_vec()))
            .collect();
        swapped.reverse();
        let swapped = GranularRelation::new(
            f.clone(),
            vec!["s1".into(), "s2".into()],
            swapped,
        )
        .unwrap();
        assert!(verify_parent(&swapped, "s1", "s2", &g, &g).unwrap());

        // Replace one s2 cell with a disjoint set: conflict appears.
        let mut tampered: Vec<(String, Vec<Granule>)> = witness
            .rows()
            .iter()
            .map(|r| (r.id().to_string(), r.cells().to_vec()))
            .collect();
        let other = if tampered[0].1[0].contains("a") {
            f.granule(["b"]).unwrap()
        } else {
            f.granule(["a"]).unwrap()
        };
        tampered[0].1[1] = other;
        let tampered = GranularRelation::new(
            f.clone(),
            vec!["s1".into(), "s2".into()],
            tampered,
        )
        .unwrap();
        assert!(!verify_parent(&tampered, "s1", "s2", &g, &g).unwrap());
    }

    #[test]
    fn verdict_is_scale_invariant() {
        let (g, h) = counterexample();
        for extra in [1, 2, 7, 30] {
            let opts = CombinableOptions {
                extra_scale: extra,
                ..CombinableOptions::default()
            };
            assert!(!combinable_with(&g, &h, &opts).unwrap().is_feasible());
        }
        let f = abc();
        let g = dist(&f, &[(&["a"], "1/2"), (&["a", "b"], "1/2")]);
        let h = dist(&f, &[(&["b"], "2/5"), (&["a", "b", "c"], "3/5")]);
        let baseline = match combinable(&g, &h).unwrap() {
            FeasibilityResult::Feasible { witness, .. } => witness.row_count(),
            _ => panic!("feasible"),
        };
        for extra in [2, 7, 30] {
            let opts = CombinableOptions {
                extra_scale: extra,
                ..CombinableOptions::default()
            };
            match combinable_with(&g, &h, &opts).unwrap() {
                FeasibilityResult::Feasible { joint, witness } => {
                    // gcd reduction erases the extra scaling entirely.
                    assert_eq!(witness.row_count(), baseline);
                    assert!(verify_parent(&witness, "s1", "s2", &g, &h).unwrap());
                    let rows = joint.row_sums();
                    for (i, (_, p)) in g.focal().iter().enumerate() {
                        assert_eq!(&rows[i], p);
                    }
                }
                other => panic!("expected feasible, got {other:?}"),
            }
        }
    }

    #[test]
    fn witness_row_cap_is_enforced() {
        let f = ab();
        let g = dist(&f, &[(&["a"], "999/1000"), (&["a", "b"], "1/1000")]);
        let h = dist(&f, &[(&["a"], "1/2"), (&["a", "b"], "1/2")]);
        let opts = CombinableOptions {
            witness_row_cap: 10,
            ..CombinableOptions::default()
        };
        assert!(matches!(
            combinable_with(&g, &h, &opts),
            Err(Error::WitnessTooLarge { cap: 10, .. })
        ));
    }

    #[test]
    fn mismatched_frames_are_rejected() {
        let g = dist(&ab(), &[(&["a"], "1")]);
        let h = dist(&abc(), &[(&["a"], "1")]);
        assert!(matches!(combinable(&g, &h), Err(Error::FrameMismatch)));
        assert!(matches!(gale_oracle(&g, &h), Err(Error::FrameMismatch)));
        assert!(matches!(
            sufficient_noncombinable(&g, &h),
            Err(Error::FrameMismatch)
        ));
    }
}
