//! Random sampling of three-pair protocols and Pareto-front extraction over
//! `(F_out, P_succ)`.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distill3::{pareto_family_closed, ParetoFamilyParam, ThreePairEvaluator, ThreePairProtocol};
use crate::distill2::MIN_SUCCESS_PROBABILITY;
use crate::error::{Error, Result};
use crate::gates::PartyUnitary3;
use crate::par;
use crate::states::Fidelity;

/// Strictness margin used by [`dominates`] and by front extraction.
pub const DOMINANCE_TOL: f64 = 1e-12;
/// Margin for comparing sampled points against the protocol family.
pub const FAMILY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub f_out: Fidelity,
    pub p_succ: f64,
    pub params: ThreePairProtocol,
}

impl ParetoPoint {
    pub fn new(f_out: f64, p_succ: f64, params: ThreePairProtocol) -> Result<Self> {
        if !(p_succ.is_finite() && (0.0..=1.0 + crate::linalg::STRUCTURE_TOL).contains(&p_succ)) {
            return Err(Error::InvalidParameter(format!("success probability {p_succ} outside [0, 1]")));
        }
        Ok(Self {
            f_out: Fidelity::from_computed(f_out)?,
            p_succ,
            params,
        })
    }

    fn params_key(&self) -> [f64; 8] {
        let (a, b) = (self.params.alice, self.params.bob);
        [a.alpha, a.a[0], a.a[1], a.a[2], b.alpha, b.a[0], b.a[1], b.a[2]]
    }
}

/// `p` is at least as good as `q` in both coordinates and better by more than
/// `tol` in at least one.
pub fn dominates_with_tol(p: &ParetoPoint, q: &ParetoPoint, tol: f64) -> bool {
    let (pf, qf) = (p.f_out.value(), q.f_out.value());
    pf >= qf && p.p_succ >= q.p_succ && (pf > qf + tol || p.p_succ > q.p_succ + tol)
}

pub fn dominates(p: &ParetoPoint, q: &ParetoPoint) -> bool {
    dominates_with_tol(p, q, DOMINANCE_TOL)
}

/// Non-dominated points ordered by increasing `f_out` (equivalently
/// decreasing `p_succ`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    points: Vec<ParetoPoint>,
}

impl ParetoFront {
    pub fn points(&self) -> &[ParetoPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<ParetoPoint> {
        self.points
    }
}

fn sweep_order(p: &ParetoPoint, q: &ParetoPoint) -> Ordering {
    q.p_succ
        .total_cmp(&p.p_succ)
        .then(q.f_out.value().total_cmp(&p.f_out.value()))
        .then_with(|| {
            p.params_key()
                .iter()
                .zip(q.params_key().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Sorts by `p_succ` descending and sweeps, keeping points whose `f_out`
/// beats everything seen so far by more than [`DOMINANCE_TOL`]. A kept point
/// whose `p_succ` is within the tolerance of the previous kept one replaces
/// it.
pub fn extract_front(points: &[ParetoPoint]) -> Result<ParetoFront> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(sweep_order);
    let mut front: Vec<ParetoPoint> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for p in sorted {
        let f = p.f_out.value();
        if f <= best + DOMINANCE_TOL {
            continue;
        }
        best = f;
        match front.last_mut() {
            Some(last) if last.p_succ - p.p_succ <= DOMINANCE_TOL => *last = p,
            _ => front.push(p),
        }
    }
    Ok(ParetoFront { points: front })
}

/// Draws one protocol from the sampling law: `alpha, beta ~ U[0, 2π)` and
/// `a, b = rho û` with `rho ~ U[0, 2π)` and `û` uniform on the sphere.
///
/// Sample `index` uses ChaCha8 stream `index` under key `seed`, so each
/// sample is independent of how the work is split.
pub fn sample_protocol(seed: u64, index: u64) -> ThreePairProtocol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let alice = sample_party(&mut rng);
    let bob = sample_party(&mut rng);
    ThreePairProtocol { alice, bob }
}

fn sample_party<R: Rng + ?Sized>(rng: &mut R) -> PartyUnitary3 {
    let alpha = rng.random_range(0.0..TAU);
    let rho = rng.random_range(0.0..TAU);
    let dir = loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            break v.map(|x| x / norm);
        }
    };
    PartyUnitary3::new(alpha, dir.map(|x| rho * x))
}

/// `n` sampled protocols evaluated at input fidelity `f`, in sample order.
pub fn sample_protocols(f: Fidelity, n: usize, seed: u64) -> Result<Vec<ParetoPoint>> {
    let eval = ThreePairEvaluator::new(f);
    par::map_indexed(n, |i| evaluate_sample(&eval, seed, i)).into_iter().collect()
}

/// Single-threaded [`sample_protocols`].
pub fn sample_protocols_sequential(f: Fidelity, n: usize, seed: u64) -> Result<Vec<ParetoPoint>> {
    let eval = ThreePairEvaluator::new(f);
    par::map_indexed_sequential(n, |i| evaluate_sample(&eval, seed, i))
        .into_iter()
        .collect()
}

fn evaluate_sample(eval: &ThreePairEvaluator, seed: u64, index: usize) -> Result<ParetoPoint> {
    let proto = sample_protocol(seed, index as u64);
    let (f_out, p_succ) = eval.evaluate(&proto);
    if p_succ < MIN_SUCCESS_PROBABILITY {
        return Err(Error::ImpossibleBranch(p_succ));
    }
    ParetoPoint::new(f_out, p_succ, proto)
}

/// Points of the protocol family at `n_r` evenly spaced parameters.
pub fn family_points(f: Fidelity, n_r: usize) -> Result<Vec<ParetoPoint>> {
    ParetoFamilyParam::grid(n_r)
        .into_iter()
        .map(|r| {
            let (f_out, p_succ) = pareto_family_closed(f.value(), r)?;
            ParetoPoint::new(f_out, p_succ, ThreePairProtocol::pareto_family(r))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub f: Fidelity,
    pub n_samples: usize,
    pub n_family: usize,
    /// Sample/family pairs where the sample dominates beyond [`FAMILY_TOL`].
    pub dominating_pairs: usize,
    /// Largest `min(ΔF_out, ΔP_succ)` of any sample over any family point;
    /// positive values mean a sample is better in both coordinates.
    pub worst_margin: f64,
    pub front: Option<ParetoFront>,
    pub warning: Option<String>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.dominating_pairs == 0
    }
}

/// Samples `n` protocols and checks that none dominates the family.
pub fn family_vs_sample(f: Fidelity, n: usize, seed: u64, n_r: usize) -> Result<FamilyReport> {
    let family = family_points(f, n_r)?;
    let samples = sample_protocols(f, n, seed)?;
    Ok(compare_with_family(f, &samples, &family))
}

/// Dominance check of precomputed samples against family points.
pub fn compare_with_family(f: Fidelity, samples: &[ParetoPoint], family: &[ParetoPoint]) -> FamilyReport {
    let warning = if samples.is_empty() {
        Some("no samples drawn; the check passes vacuously".to_string())
    } else if family.is_empty() {
        Some("no family points; the check passes vacuously".to_string())
    } else {
        None
    };
    let mut dominating_pairs = 0;
    let mut worst_margin = f64::NEG_INFINITY;
    for s in samples {
        for q in family {
            if dominates_with_tol(s, q, FAMILY_TOL) {
                dominating_pairs += 1;
            }
            let margin = (s.f_out.value() - q.f_out.value()).min(s.p_succ - q.p_succ);
            worst_margin = worst_margin.max(margin);
        }
    }
    FamilyReport {
        f,
        n_samples: samples.len(),
        n_family: family.len(),
        dominating_pairs,
        worst_margin,
        front: extract_front(samples).ok(),
        warning,
    }
}
