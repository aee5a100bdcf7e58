//! Weak, strong and dominant energy conditions at a single event.
//!
//! A symmetric tensor A is observer non-negative definite when A(u,u) ≥ 0 for
//! every future unit timelike u, and dominantly non-negative when −Ã(u) is
//! future causal for every such u, where g(Ã(u), v) = A(u, v). The weak
//! condition asks this of T, the strong condition of T̂ = T − ½c(T)g.
//!
//! Checks combine a boost-grid scan around a reference observer (with the
//! null limit of every grid direction) and, when T has a timelike
//! eigenvector, the closed-form criteria for a fluid with density ρ and
//! principal pressures p_i.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::hat;
use crate::error::Result;
use crate::tensor::{orthonormal_frame, principal_pressures, LocalMetric, Mat4, Observer, SymTensor2, TangentVector, Vec4};

/// Absolute tolerance for boundary (null) cases.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Rapidity doublings tried when turning a null-limit violation into a timelike witness.
const REFINE_DOUBLINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Weak,
    Strong,
    Dominant,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Weak, Condition::Strong, Condition::Dominant];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Weak => "weak",
            Condition::Strong => "strong",
            Condition::Dominant => "dominant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "certificate", rename_all = "lowercase")]
pub enum Certificate {
    /// Closed-form criteria on the fluid decomposition.
    Exact,
    /// Only the sampled observers were checked.
    Grid { beta_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Holds(Certificate),
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails)
    }
}

/// Observer and partner vector realizing a margin.
///
/// For the weak and strong conditions the partner is the observer itself;
/// for the dominant condition it is the future null vector along which
/// T(u, ·) is smallest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub observer: [f64; 4],
    pub partner: [f64; 4],
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: Condition,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub margin: f64,
}

/// Observers sampled around a reference observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostGrid {
    /// Number of nonzero rapidity levels, evenly spaced up to `beta_max`.
    pub levels: usize,
    pub beta_max: f64,
    /// Extra observers with random direction and rapidity.
    pub random_samples: usize,
    pub seed: u64,
}

impl Default for BoostGrid {
    fn default() -> Self {
        Self {
            levels: 24,
            beta_max: 0.999,
            random_samples: 0,
            seed: 42,
        }
    }
}

impl BoostGrid {
    pub fn max_rapidity(&self) -> f64 {
        self.beta_max.atanh()
    }

    pub fn rapidities(&self) -> Vec<f64> {
        let phi = self.max_rapidity();
        (1..=self.levels).map(|k| phi * k as f64 / self.levels as f64).collect()
    }

    /// Unit directions: the 6 face, 12 edge and 8 corner directions of a cube.
    pub fn cube_directions() -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(26);
        for i in -1i32..=1 {
            for j in -1i32..=1 {
                for k in -1i32..=1 {
                    if (i, j, k) == (0, 0, 0) {
                        continue;
                    }
                    let n = ((i * i + j * j + k * k) as f64).sqrt();
                    out.push([i as f64 / n, j as f64 / n, k as f64 / n]);
                }
            }
        }
        out
    }

    /// (rapidity, direction) pairs, starting with the reference observer itself.
    pub fn boosts(&self) -> Vec<(f64, [f64; 3])> {
        let dirs = Self::cube_directions();
        let mut out = vec![(0.0, [1.0, 0.0, 0.0])];
        for phi in self.rapidities() {
            for d in &dirs {
                out.push((phi, *d));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let phi_max = self.max_rapidity();
        while out.len() < 1 + self.levels * dirs.len() + self.random_samples {
            let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let n2: f64 = v.iter().map(|c| c * c).sum();
            if n2 > 1.0 || n2 < 1e-6 {
                continue;
            }
            let n = n2.sqrt();
            out.push((rng.random_range(0.0..phi_max), v.map(|c| c / n)));
        }
        out
    }

    /// Unit future timelike vectors of the grid, in coordinate components.
    pub fn observers(&self, reference: &Observer) -> Vec<Vec4> {
        self.boosts()
            .into_iter()
            .map(|(phi, n)| boost_velocity(reference, phi, &n))
            .collect()
    }
}

fn spatial(reference: &Observer, n: &[f64; 3]) -> Vec4 {
    reference.leg(0) * n[0] + reference.leg(1) * n[1] + reference.leg(2) * n[2]
}

fn boost_velocity(reference: &Observer, phi: f64, n: &[f64; 3]) -> Vec4 {
    reference.u() * phi.cosh() + spatial(reference, n) * phi.sinh()
}

/// Ã with g(Ã(u), v) = A(u, v): the matrix of A^a_b.
pub fn mixed_form(a: &SymTensor2, metric: &LocalMetric) -> Mat4 {
    metric.inverse * a.components
}

/// Exact verdicts for a fluid with density ρ and principal pressures p_i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidOracle {
    pub rho: f64,
    pub pressures: [f64; 3],
}

impl FluidOracle {
    /// Infimum of the condition's margin over unit observers when it holds,
    /// otherwise the most negative closed-form criterion.
    pub fn margin(&self, condition: Condition) -> f64 {
        let rho = self.rho;
        let sum: f64 = self.pressures.iter().sum();
        let min_rho_p = self.pressures.iter().map(|p| rho + p).fold(f64::INFINITY, f64::min);
        let max_abs_p = self.pressures.iter().map(|p| p.abs()).fold(0.0, f64::max);
        // With ρ + p_i ≥ 0, A(u,u) grows with the boost, so the infimum sits at rest.
        let rest_or_worst = |rest: f64| if min_rho_p >= 0.0 { rest } else { rest.min(min_rho_p) };
        match condition {
            Condition::Weak => rest_or_worst(rho),
            Condition::Strong => rest_or_worst(0.5 * (rho + sum)),
            Condition::Dominant => {
                let gap = rho - max_abs_p;
                if gap >= 0.0 {
                    (rho * rho - max_abs_p * max_abs_p).max(0.0).sqrt()
                } else {
                    gap
                }
            }
        }
    }

    pub fn holds(&self, condition: Condition) -> bool {
        self.margin(condition) >= -BOUNDARY_TOLERANCE
    }
}

/// Fluid decomposition of `t` when it has a timelike eigenvector.
pub fn type_one_decomposition(t: &SymTensor2, metric: &LocalMetric, reference: &Observer) -> Option<(Observer, FluidOracle)> {
    let m = mixed_form(t, metric);
    let scale = m.abs().max();
    if scale == 0.0 {
        return Some((
            *reference,
            FluidOracle {
                rho: 0.0,
                pressures: [0.0; 3],
            },
        ));
    }
    let eigenvalues = m.eigenvalues()?;
    let u0 = *reference.u();
    for lambda in eigenvalues.iter() {
        let shifted = (m - Mat4::identity() * *lambda) / scale;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let null: Vec<Vec4> = (0..4)
            .filter(|&k| svd.singular_values[k] < 1e-9)
            .map(|k| v_t.row(k).transpose())
            .collect();
        if null.is_empty() {
            continue;
        }
        let projected: Vec4 = null.iter().map(|n| n * n.dot(&u0)).sum();
        for cand in std::iter::once(projected).chain(null.iter().copied()) {
            let n2 = metric.norm2(&cand);
            if !(n2 < -1e-8 * cand.norm_squared() * metric.g.abs().max()) {
                continue;
            }
            let mut u = cand / (-n2).sqrt();
            if metric.dot(&u, &u0) > 0.0 {
                u = -u;
            }
            let Ok(obs) = orthonormal_frame(metric, &TangentVector::new(metric.event, u)) else {
                continue;
            };
            let residual = (m * u - u * *lambda).amax();
            if residual > 1e-9 * scale * u.amax() {
                continue;
            }
            let Ok(pp) = principal_pressures(t, &obs) else {
                continue;
            };
            return Some((
                pp.observer,
                FluidOracle {
                    rho: t.quadratic(&u),
                    pressures: pp.pressures,
                },
            ));
        }
    }
    None
}

struct Evaluator<'a> {
    condition: Condition,
    /// T for weak and dominant, T̂ for strong.
    form: SymTensor2,
    mixed: Mat4,
    metric: &'a LocalMetric,
    reference: &'a Observer,
}

impl<'a> Evaluator<'a> {
    fn new(condition: Condition, t: &SymTensor2, metric: &'a LocalMetric, reference: &'a Observer) -> Result<Self> {
        let form = match condition {
            Condition::Strong => hat(t, metric)?,
            _ => *t,
        };
        Ok(Self {
            condition,
            form,
            mixed: mixed_form(t, metric),
            metric,
            reference,
        })
    }

    /// Margin at a future causal vector `u`.
    fn witness(&self, u: &Vec4) -> Witness {
        let partner = match self.condition {
            Condition::Dominant => {
                // V = −Ã(u) in the reference frame; the partner e_0 + V̂ gives
                // T(u, partner) = V⁰ − |V⃗|.
                let v = -(self.mixed * u);
                let vs = [0, 1, 2].map(|i| self.metric.dot(&v, self.reference.leg(i)));
                let len = vs.iter().map(|c| c * c).sum::<f64>().sqrt();
                if len > 0.0 {
                    self.reference.u() + spatial(self.reference, &vs.map(|c| c / len))
                } else {
                    *self.reference.u()
                }
            }
            _ => *u,
        };
        Witness {
            observer: (*u).into(),
            partner: partner.into(),
            value: self.form.apply(u, &partner),
        }
    }
}

/// Re-evaluates a witness: T(u, v) for weak and dominant, T̂(u, v) for strong.
pub fn reevaluate(condition: Condition, t: &SymTensor2, metric: &LocalMetric, witness: &Witness) -> Result<f64> {
    let u = Vec4::from(witness.observer);
    let v = Vec4::from(witness.partner);
    Ok(match condition {
        Condition::Strong => hat(t, metric)?.apply(&u, &v),
        _ => t.apply(&u, &v),
    })
}

/// Outcome of scanning the grid observers and their null limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridScan {
    /// Smallest margin over the timelike samples.
    pub minimum: Witness,
    /// A timelike sample with margin below −tolerance, if one was found.
    pub violation: Option<Witness>,
    /// A null-limit direction with negative margin that could not be turned into a timelike witness.
    pub unresolved_null: bool,
}

fn search_direction(ev: &Evaluator, reference: &Observer, start: f64, n: &[f64; 3]) -> Option<Witness> {
    let mut phi = start.max(0.5);
    for _ in 0..REFINE_DOUBLINGS {
        phi *= 2.0;
        let w = ev.witness(&boost_velocity(reference, phi, n));
        if w.value < -BOUNDARY_TOLERANCE {
            return Some(w);
        }
    }
    None
}

/// Scans the grid only, without the closed-form oracle.
pub fn grid_scan(condition: Condition, t: &SymTensor2, metric: &LocalMetric, reference: &Observer, grid: &BoostGrid) -> Result<GridScan> {
    let ev = Evaluator::new(condition, t, metric, reference)?;
    let mut minimum: Option<Witness> = None;
    for u in grid.observers(reference) {
        let w = ev.witness(&u);
        if minimum.map_or(true, |m| w.value < m.value) {
            minimum = Some(w);
        }
    }
    let minimum = minimum.expect("grid contains the reference observer");
    let mut violation = (minimum.value < -BOUNDARY_TOLERANCE).then_some(minimum);
    let mut unresolved_null = false;
    if violation.is_none() {
        let phi_max = grid.max_rapidity();
        for (_, n) in grid.boosts().into_iter().skip(1) {
            let k = reference.u() + spatial(reference, &n);
            if ev.witness(&k).value < -BOUNDARY_TOLERANCE {
                match search_direction(&ev, reference, phi_max, &n) {
                    Some(w) => {
                        violation = Some(w);
                        break;
                    }
                    None => unresolved_null = true,
                }
            }
        }
    }
    Ok(GridScan {
        minimum,
        violation,
        unresolved_null,
    })
}

/// Checks one condition for `t` at the reference observer's event.
pub fn check(condition: Condition, t: &SymTensor2, metric: &LocalMetric, reference: &Observer, grid: &BoostGrid) -> Result<ConditionVerdict> {
    let scan = grid_scan(condition, t, metric, reference, grid)?;
    if let Some(w) = scan.violation {
        return Ok(ConditionVerdict {
            condition,
            verdict: Verdict::Fails,
            witness: Some(w),
            margin: w.value,
        });
    }
    if let Some((frame, oracle)) = type_one_decomposition(t, metric, reference) {
        if oracle.holds(condition) {
            return Ok(ConditionVerdict {
                condition,
                verdict: Verdict::Holds(Certificate::Exact),
                witness: Some(scan.minimum),
                margin: oracle.margin(condition),
            });
        }
        // The grid missed a violation the closed form predicts: search the
        // fluid's own rest frame along its principal axes.
        let ev = Evaluator::new(condition, t, metric, &frame)?;
        let rest = ev.witness(frame.u());
        if rest.value < -BOUNDARY_TOLERANCE {
            return Ok(fails(condition, rest));
        }
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut n = [0.0; 3];
                n[axis] = sign;
                if let Some(w) = search_direction(&ev, &frame, 0.25, &n) {
                    return Ok(fails(condition, w));
                }
            }
        }
        return Ok(ConditionVerdict {
            condition,
            verdict: Verdict::Inconclusive,
            witness: Some(scan.minimum),
            margin: oracle.margin(condition),
        });
    }
    let verdict = if scan.unresolved_null {
        Verdict::Inconclusive
    } else {
        Verdict::Holds(Certificate::Grid { beta_max: grid.beta_max })
    };
    Ok(ConditionVerdict {
        condition,
        verdict,
        witness: Some(scan.minimum),
        margin: scan.minimum.value,
    })
}

fn fails(condition: Condition, w: Witness) -> ConditionVerdict {
    ConditionVerdict {
        condition,
        verdict: Verdict::Fails,
        witness: Some(w),
        margin: w.value,
    }
}

/// T(u,u) ≥ 0 for all observers.
pub fn check_weak(t: &SymTensor2, metric: &LocalMetric, reference: &Observer, grid: &BoostGrid) -> Result<ConditionVerdict> {
    check(Condition::Weak, t, metric, reference, grid)
}

/// T̂(u,u) ≥ 0 for all observers, i.e. 2T(u,u) ≥ −c(T).
pub fn check_strong(t: &SymTensor2, metric: &LocalMetric, reference: &Observer, grid: &BoostGrid) -> Result<ConditionVerdict> {
    check(Condition::Strong, t, metric, reference, grid)
}

/// −T̃(u) future causal for all observers.
pub fn check_dominant(t: &SymTensor2, metric: &LocalMetric, reference: &Observer, grid: &BoostGrid) -> Result<ConditionVerdict> {
    check(Condition::Dominant, t, metric, reference, grid)
}

pub fn check_all(t: &SymTensor2, metric: &LocalMetric, reference: &Observer, grid: &BoostGrid) -> Result<Vec<ConditionVerdict>> {
    Condition::ALL
        .iter()
        .map(|c| check(*c, t, metric, reference, grid))
        .collect()
}

/// Smallest A(u,u) over the grid observers, e.g. Ric(u,u) for the geometric strong test.
pub fn grid_minimum(a: &SymTensor2, reference: &Observer, grid: &BoostGrid) -> f64 {
    grid.observers(reference)
        .iter()
        .map(|u| a.quadratic(u))
        .fold(f64::INFINITY, f64::min)
}
