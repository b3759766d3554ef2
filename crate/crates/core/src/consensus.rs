//! The consensus protocol on a manifold: the disagreement cost, its
//! per-node gradient, the synchronous (Jacobi) update, the curvature-aware
//! step-size calculus and the convergence-certificate checks.
//!
//! The protocol minimizes
//!
//! ```text
//! phi(x) = 1/2 * sum over edges {i,j} of d^2(x_i, x_j)
//! ```
//!
//! by intrinsic gradient descent: each node moves along
//! `exp_{x_i}(eps * sum_{j in N_i} log_{x_i}(x_j))`, with every gradient
//! evaluated on the same iteration snapshot before any node moves.

use crate::error::{Error, Result};
use crate::frechet::{frechet_mean, FrechetConfig, FrechetInit};
use crate::geometry::{ManifoldHandle, Point, Tangent};
use crate::network::Graph;

/// Max-pairwise-distance threshold below which a state is declared a
/// consensus configuration.
pub const CONSENSUS_TOL: f64 = 1e-6;

/// The N-tuple of node states at one iteration, plus the immutable
/// measurements the run started from.
#[derive(Debug, Clone)]
pub struct NetworkState {
    pub manifold: ManifoldHandle,
    pub states: Vec<Point>,
    pub measurements: Vec<Point>,
    pub iteration: usize,
}

impl NetworkState {
    /// Initial state: `x_i(0) = u_i`.
    pub fn from_measurements(manifold: ManifoldHandle, measurements: Vec<Point>) -> Result<Self> {
        if measurements.len() < 2 {
            return Err(Error::Contract("need at least two nodes".into()));
        }
        for p in &measurements {
            if p.manifold.kind != manifold.kind {
                return Err(Error::Contract("measurement on wrong manifold".into()));
            }
        }
        Ok(NetworkState {
            manifold,
            states: measurements.clone(),
            measurements,
            iteration: 0,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.states.len()
    }

    /// Largest distance between any two node states.
    pub fn max_pairwise_dist(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.states.len() {
            for j in i + 1..self.states.len() {
                max = max.max(self.manifold.dist(&self.states[i], &self.states[j]));
            }
        }
        max
    }

    /// Largest distance across a communication edge.
    pub fn max_edge_dist(&self, g: &Graph) -> f64 {
        g.edges()
            .iter()
            .map(|&(i, j)| self.manifold.dist(&self.states[i], &self.states[j]))
            .fold(0.0, f64::max)
    }
}

/// How the step size is chosen.
#[derive(Debug, Clone)]
pub enum StepMode {
    /// A caller-supplied step size, used verbatim.
    Explicit(f64),
    /// Just inside the open descent interval `(0, 2/mu_max)`.
    AutoDescent,
    /// `1/mu_max`, the range for which single-point convergence is known on
    /// constant non-negative curvature.
    AutoPointConvergence,
}

#[derive(Debug, Clone)]
pub struct StepSizePolicy {
    pub mode: StepMode,
    /// Maximum allowed neighbor distance; defaults to `2 r*`.
    pub d_max: Option<f64>,
    /// Multiplier in (0, 1] applied to the auto-selected step.
    pub safety: f64,
}

impl StepSizePolicy {
    pub fn auto_descent() -> Self {
        StepSizePolicy {
            mode: StepMode::AutoDescent,
            d_max: None,
            safety: 1.0,
        }
    }

    pub fn auto_point_convergence() -> Self {
        StepSizePolicy {
            mode: StepMode::AutoPointConvergence,
            d_max: None,
            safety: 1.0,
        }
    }

    pub fn explicit(eps: f64) -> Self {
        StepSizePolicy {
            mode: StepMode::Explicit(eps),
            d_max: None,
            safety: 1.0,
        }
    }

    pub fn effective_d_max(&self, m: &ManifoldHandle) -> f64 {
        self.d_max.unwrap_or(2.0 * m.r_star)
    }
}

/// A selected step size, with a warning flag when an explicit choice exceeds
/// the descent guarantee.
#[derive(Debug, Clone, Copy)]
pub struct StepSize {
    pub value: f64,
    pub exceeds_descent_bound: bool,
}

/// Pairwise Hessian bound for the half-squared-distance terms:
///
/// ```text
/// mu_max_d = max{ 2, d_max * ( C_delta(d_max)/S_delta(d_max) + 1/S_Delta(d_max) ) }
/// ```
///
/// For constant curvature `delta = Delta = kappa >= 0` the bound is exactly 2
/// (the limit value), independent of the separation.
///
/// ```
/// use manifold_consensus::consensus::mu_max_d;
/// use std::f64::consts::PI;
///
/// // curvature spread of SO(n >= 4) at separation pi, and of Grass(n, p)
/// // at separation pi/2, share the same numerical bound
/// assert!((mu_max_d(PI, 0.0, 0.5).unwrap() - 3.792).abs() < 1e-3);
/// assert!((mu_max_d(PI / 2.0, 0.0, 2.0).unwrap() - 3.792).abs() < 1e-3);
/// // any constant non-negative curvature collapses to the flat value
/// assert_eq!(mu_max_d(1.0, 0.25, 0.25).unwrap(), 2.0);
/// ```
pub fn mu_max_d(d_max: f64, curv_lo: f64, curv_hi: f64) -> Result<f64> {
    use crate::geometry::kappa::{c_kappa, s_kappa};
    if !(d_max > 0.0) {
        return Err(Error::Domain(format!("d_max must be positive, got {d_max}")));
    }
    if curv_lo == curv_hi && curv_lo >= 0.0 {
        return Ok(2.0);
    }
    let s_hi = s_kappa(curv_hi, d_max);
    if s_hi <= 0.0 {
        return Err(Error::Domain(format!(
            "S_Delta(d_max) = {s_hi} <= 0: d_max too large for curvature bound {curv_hi}"
        )));
    }
    let ratio_lo = if curv_lo == 0.0 {
        1.0 / d_max
    } else {
        c_kappa(curv_lo, d_max) / s_kappa(curv_lo, d_max)
    };
    Ok((d_max * (ratio_lo + 1.0 / s_hi)).max(2.0))
}

/// Composed Hessian bound for the full cost: `mu_max = mu_max_d * deg(G)`.
pub fn mu_max(g: &Graph, m: &ManifoldHandle, d_max: f64) -> Result<f64> {
    Ok(mu_max_d(d_max, m.curv_lo, m.curv_hi)? * g.max_degree() as f64)
}

/// Selects a step size according to the policy.
pub fn admissible_step(g: &Graph, m: &ManifoldHandle, policy: &StepSizePolicy) -> Result<StepSize> {
    let d_max = policy.effective_d_max(m);
    if d_max > 2.0 * m.r_star {
        return Err(Error::Domain(format!(
            "d_max {d_max} exceeds 2 r* = {}",
            2.0 * m.r_star
        )));
    }
    let mu = mu_max(g, m, d_max)?;
    match policy.mode {
        StepMode::Explicit(eps) => {
            if !(eps > 0.0) {
                return Err(Error::Domain("explicit step size must be positive".into()));
            }
            Ok(StepSize {
                value: eps,
                exceeds_descent_bound: eps >= 2.0 / mu,
            })
        }
        // the descent interval is open, stay strictly inside it
        StepMode::AutoDescent => Ok(StepSize {
            value: policy.safety * (2.0 / mu) * (1.0 - 1e-9),
            exceeds_descent_bound: false,
        }),
        StepMode::AutoPointConvergence => Ok(StepSize {
            value: policy.safety / mu,
            exceeds_descent_bound: false,
        }),
    }
}

/// The disagreement potential `1/2 * sum_{{i,j} in E} d^2(x_i, x_j)`.
pub fn cost(g: &Graph, s: &NetworkState) -> f64 {
    0.5 * g
        .edges()
        .iter()
        .map(|&(i, j)| s.manifold.dist(&s.states[i], &s.states[j]).powi(2))
        .sum::<f64>()
}

/// Gradient of the cost with respect to node `i`:
/// `-sum_{j in N_i} log_{x_i}(x_j)`, anchored at `x_i`.
pub fn grad_node(g: &Graph, s: &NetworkState, i: usize) -> Result<Tangent> {
    let xi = &s.states[i];
    let mut grad = s.manifold.zero_tangent(xi);
    for &j in g.neighbors(i) {
        let l = s.manifold.log(xi, &s.states[j])?;
        grad.value -= &l.value;
    }
    Ok(grad)
}

/// Norm of the full product-manifold gradient, `sqrt(sum_i |grad_i|^2)`.
pub fn full_gradient_norm(g: &Graph, s: &NetworkState) -> Result<f64> {
    let mut sq = 0.0;
    for i in 0..s.n_nodes() {
        sq += grad_node(g, s, i)?.norm().powi(2);
    }
    Ok(sq.sqrt())
}

fn node_gradients(g: &Graph, s: &NetworkState) -> Result<Vec<Tangent>> {
    (0..s.n_nodes()).map(|i| grad_node(g, s, i)).collect()
}

/// One synchronous update `x_i <- exp_{x_i}(-eps * grad_i)`. All gradients
/// are evaluated on the input snapshot before any node moves; the
/// measurements are untouched.
pub fn step(g: &Graph, s: &NetworkState, eps: f64) -> Result<NetworkState> {
    if !(eps > 0.0) {
        return Err(Error::Domain("step size must be positive".into()));
    }
    let grads = node_gradients(g, s)?;
    let states = grads
        .iter()
        .map(|grad| s.manifold.exp(&grad.scale(-eps)))
        .collect();
    Ok(NetworkState {
        manifold: s.manifold,
        states,
        measurements: s.measurements.clone(),
        iteration: s.iteration + 1,
    })
}

/// Sufficient certificate for membership in the tube S around the consensus
/// submanifold: some center has every state within r*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    CertifiedYes,
    Unknown,
}

impl Certificate {
    pub fn is_certified(self) -> bool {
        self == Certificate::CertifiedYes
    }
}

/// Tries each node state and the Fréchet mean of the states as candidate
/// centers. This is a sufficient check, not a decision procedure: `Unknown`
/// does not prove the state lies outside S.
pub fn in_set_s(s: &NetworkState) -> Certificate {
    if s.manifold.r_star.is_infinite() {
        return Certificate::CertifiedYes;
    }
    let covered_by = |y: &Point| {
        s.states
            .iter()
            .all(|x| s.manifold.dist(x, y) < s.manifold.r_star)
    };
    let cfg = FrechetConfig {
        max_iter: 200,
        tol: 1e-10,
        init: FrechetInit::FirstPoint,
    };
    if let Ok(out) = frechet_mean(&s.states, &cfg) {
        if covered_by(&out.mean) {
            return Certificate::CertifiedYes;
        }
    }
    if s.states.iter().any(covered_by) {
        return Certificate::CertifiedYes;
    }
    Certificate::Unknown
}

/// Membership in the certified basin `S_conv`: `phi(x) < (r*)^2 / (2 diam(G))`.
/// Always true when r* is infinite.
pub fn in_s_conv(g: &Graph, s: &NetworkState) -> Result<bool> {
    if s.manifold.r_star.is_infinite() {
        return Ok(true);
    }
    let d = g.diameter()? as f64;
    Ok(cost(g, s) < s.manifold.r_star.powi(2) / (2.0 * d))
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone)]
pub struct IterRecord {
    pub iter: usize,
    pub cost: f64,
    pub grad_norm: f64,
    pub max_pair_dist: f64,
    pub max_edge_dist: f64,
    pub in_s: bool,
    pub in_s_conv: bool,
    /// Distance from each node state to the Fréchet mean of the
    /// measurements (NaN when that mean is unavailable).
    pub dist_to_measurement_mean: Vec<f64>,
    /// Distance between the Fréchet mean of the current states and the
    /// Fréchet mean of the measurements (NaN when unavailable).
    pub state_mean_gap: f64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub converged: bool,
    pub iterations: usize,
    pub epsilon: f64,
    /// Terminal distance between the two Fréchet means (NaN if unavailable).
    pub frechet_gap: f64,
    /// Whether any realized edge distance exceeded the policy's d_max
    /// (observed, never enforced).
    pub exceeded_d_max: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<IterRecord>,
    pub summary: RunSummary,
    pub final_state: NetworkState,
}

impl RunTrace {
    /// One row per iteration, schema:
    /// `iter,cost,grad_norm,max_pair_dist,max_edge_dist,in_S,in_S_conv,dist_node_1_to_frechet,...`
    pub fn trace_csv(&self) -> String {
        let n = self.final_state.n_nodes();
        let mut out = String::from("iter,cost,grad_norm,max_pair_dist,max_edge_dist,in_S,in_S_conv");
        for i in 1..=n {
            out.push_str(&format!(",dist_node_{i}_to_frechet"));
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{},{}",
                r.iter,
                r.cost,
                r.grad_norm,
                r.max_pair_dist,
                r.max_edge_dist,
                r.in_s as u8,
                r.in_s_conv as u8
            ));
            for d in &r.dist_to_measurement_mean {
                out.push_str(&format!(",{d:.12e}"));
            }
            out.push('\n');
        }
        out
    }

    /// Single-row summary, schema: `seed,epsilon,converged,frechet_gap`.
    pub fn summary_csv(&self, seed: u64) -> String {
        format!(
            "seed,epsilon,converged,frechet_gap\n{},{:.12e},{},{:.12e}\n",
            seed, self.summary.epsilon, self.summary.converged as u8, self.summary.frechet_gap
        )
    }
}

/// Runs the protocol until the full gradient norm drops below `grad_tol` or
/// `max_iter` steps were taken. A cut-locus failure aborts the run, keeping
/// the trace so far and setting the summary error.
pub fn run(
    g: &Graph,
    s0: &NetworkState,
    policy: &StepSizePolicy,
    max_iter: usize,
    grad_tol: f64,
) -> Result<RunTrace> {
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    if g.n_vertices() != s0.n_nodes() {
        return Err(Error::Contract(format!(
            "graph has {} vertices but state has {} nodes",
            g.n_vertices(),
            s0.n_nodes()
        )));
    }
    let eps = admissible_step(g, &s0.manifold, policy)?.value;
    let d_max = policy.effective_d_max(&s0.manifold);

    let measurement_mean = frechet_mean(&s0.measurements, &FrechetConfig::default())
        .ok()
        .filter(|o| o.converged)
        .map(|o| o.mean);

    let mut records = Vec::with_capacity(max_iter + 1);
    let mut state = s0.clone();
    let mut state_mean_seed = measurement_mean.clone();
    let mut exceeded_d_max = false;
    let mut error = None;

    loop {
        let max_edge = state.max_edge_dist(g);
        exceeded_d_max |= max_edge > d_max;
        let grad_norm = match full_gradient_norm(g, &state) {
            Ok(v) => v,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        };
        let (dists, gap) = match &measurement_mean {
            Some(mean) => {
                let dists = state
                    .states
                    .iter()
                    .map(|x| state.manifold.dist(x, mean))
                    .collect();
                // warm-start the state mean from the previous iteration
                let cfg = FrechetConfig {
                    init: FrechetInit::GivenPoint(
                        state_mean_seed.clone().unwrap_or_else(|| mean.clone()),
                    ),
                    ..FrechetConfig::default()
                };
                let gap = match frechet_mean(&state.states, &cfg) {
                    Ok(out) => {
                        let gap = state.manifold.dist(&out.mean, mean);
                        state_mean_seed = Some(out.mean);
                        gap
                    }
                    Err(_) => f64::NAN,
                };
                (dists, gap)
            }
            None => (vec![f64::NAN; state.n_nodes()], f64::NAN),
        };
        records.push(IterRecord {
            iter: state.iteration,
            cost: cost(g, &state),
            grad_norm,
            max_pair_dist: state.max_pairwise_dist(),
            max_edge_dist: max_edge,
            in_s: in_set_s(&state).is_certified(),
            in_s_conv: in_s_conv(g, &state)?,
            dist_to_measurement_mean: dists,
            state_mean_gap: gap,
        });
        if grad_norm < grad_tol || state.iteration >= max_iter {
            break;
        }
        match step(g, &state, eps) {
            Ok(next) => state = next,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }

    let converged = error.is_none() && state.max_pairwise_dist() < CONSENSUS_TOL;
    let frechet_gap = records.last().map_or(f64::NAN, |r| r.state_mean_gap);
    Ok(RunTrace {
        summary: RunSummary {
            converged,
            iterations: state.iteration,
            epsilon: eps,
            frechet_gap,
            exceeded_d_max,
            error,
        },
        records,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{make_topology, TopologySpec};
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn euclid_line_state(coords: &[f64]) -> (crate::network::Graph, NetworkState) {
        let m = ManifoldHandle::euclidean(1);
        let g = make_topology(&TopologySpec::Line(coords.len())).unwrap();
        let points = coords
            .iter()
            .map(|&c| Point::new(m, DMatrix::from_element(1, 1, c)).unwrap())
            .collect();
        (g, NetworkState::from_measurements(m, points).unwrap())
    }

    #[test]
    fn cost_hand_evaluations() {
        let (g, s) = euclid_line_state(&[0.0, 1.0, 3.0]);
        assert!((cost(&g, &s) - 2.5).abs() < 1e-15);

        // two sphere nodes a quarter turn apart
        let m = ManifoldHandle::sphere(2);
        let e1 = Point::new(m, DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap();
        let e2 = Point::new(m, DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0])).unwrap();
        let g2 = make_topology(&TopologySpec::Line(2)).unwrap();
        let s2 = NetworkState::from_measurements(m, vec![e1, e2]).unwrap();
        assert!((cost(&g2, &s2) - 0.5 * FRAC_PI_2.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_interior_node() {
        let (g, s) = euclid_line_state(&[0.0, 1.0, 3.0]);
        // node 1 neighbors 0 and 2: -( (0-1) + (3-1) ) = -1
        let grad = grad_node(&g, &s, 1).unwrap();
        assert!((grad.value[(0, 0)] + 1.0).abs() < 1e-15);
        // leaf node 0: -(x_1 - x_0) = -1; leaf node 2: -(x_1 - x_2) = 2
        let leaf = grad_node(&g, &s, 0).unwrap();
        assert!((leaf.value[(0, 0)] + 1.0).abs() < 1e-15);
        let leaf2 = grad_node(&g, &s, 2).unwrap();
        assert!((leaf2.value[(0, 0)] - 2.0).abs() < 1e-15);
        let total = full_gradient_norm(&g, &s).unwrap();
        assert!((total - (1.0f64 + 1.0 + 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn step_matches_hand_iteration_and_preserves_mean() {
        let (g, s) = euclid_line_state(&[0.0, 1.0, 3.0]);
        let next = step(&g, &s, 0.25).unwrap();
        let vals: Vec<f64> = next.states.iter().map(|p| p.value[(0, 0)]).collect();
        assert_eq!(next.iteration, 1);
        assert!((vals[0] - 0.25).abs() < 1e-15);
        assert!((vals[1] - 1.25).abs() < 1e-15);
        assert!((vals[2] - 2.5).abs() < 1e-15);
        let mean: f64 = vals.iter().sum::<f64>() / 3.0;
        assert!((mean - 4.0 / 3.0).abs() < 1e-15);
        // measurements are untouched by stepping
        assert_eq!(next.measurements[2].value[(0, 0)], 3.0);
    }

    #[test]
    fn consensus_states_are_fixed_points() {
        let m = ManifoldHandle::special_orthogonal(3);
        let g = make_topology(&TopologySpec::Ring(4)).unwrap();
        let p = m.base_point();
        let s = NetworkState::from_measurements(m, vec![p.clone(); 4]).unwrap();
        let next = step(&g, &s, 0.2).unwrap();
        for x in &next.states {
            assert!(m.dist(x, &p) < 1e-14);
        }
        assert_eq!(s.max_pairwise_dist(), 0.0);
    }

    #[test]
    fn mu_max_d_values() {
        // the two curvature profiles share the 3.792 value at d_max = 2 r*
        assert!((mu_max_d(PI, 0.0, 0.5).unwrap() - 3.792).abs() < 1e-3);
        assert!((mu_max_d(FRAC_PI_2, 0.0, 2.0).unwrap() - 3.792).abs() < 1e-3);
        for kappa in [0.0, 0.25, 1.0] {
            assert_eq!(mu_max_d(0.7, kappa, kappa).unwrap(), 2.0);
        }
        // d_max at or past pi/sqrt(curv_hi) leaves the admissible regime
        assert!(mu_max_d(PI + 0.1, 0.0, 1.0).is_err());
        assert!(mu_max_d(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn mu_max_scales_with_degree() {
        let m = ManifoldHandle::sphere(3);
        let ring = make_topology(&TopologySpec::Ring(6)).unwrap();
        let four_reg = make_topology(&TopologySpec::Circulant(6, vec![1, 2])).unwrap();
        let d = 2.0 * m.r_star;
        assert_eq!(mu_max(&ring, &m, d).unwrap(), 4.0);
        assert_eq!(mu_max(&four_reg, &m, d).unwrap(), 8.0);
    }

    #[test]
    fn admissible_step_policies() {
        let m = ManifoldHandle::sphere(3);
        let g = make_topology(&TopologySpec::Circulant(8, vec![1, 2])).unwrap();
        // mu_max = 2 * 4: point-convergence step is exactly 1/8
        let point = admissible_step(&g, &m, &StepSizePolicy::auto_point_convergence()).unwrap();
        assert!((point.value - 0.125).abs() < 1e-15);
        let descent = admissible_step(&g, &m, &StepSizePolicy::auto_descent()).unwrap();
        assert!(descent.value < 0.25 && descent.value > 0.2499);
        assert!(!descent.exceeds_descent_bound);

        let loose = admissible_step(&g, &m, &StepSizePolicy::explicit(0.3)).unwrap();
        assert!(loose.exceeds_descent_bound);
        assert!(admissible_step(&g, &m, &StepSizePolicy::explicit(-0.1)).is_err());

        let bad_d_max = StepSizePolicy {
            d_max: Some(3.0 * m.r_star),
            ..StepSizePolicy::auto_descent()
        };
        assert!(admissible_step(&g, &m, &bad_d_max).is_err());
    }

    #[test]
    fn tube_certificate() {
        let m = ManifoldHandle::euclidean(2);
        let p = m.base_point();
        let far = Point::new(m, DMatrix::from_column_slice(2, 1, &[1e6, 0.0])).unwrap();
        let s = NetworkState::from_measurements(m, vec![p, far]).unwrap();
        assert!(in_set_s(&s).is_certified(), "flat space is always in S");

        let sph = ManifoldHandle::sphere(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = sph.base_point();
        let near: Vec<Point> = (0..4)
            .map(|_| sph.exp(&sph.random_tangent(&base, 0.2, &mut rng)))
            .collect();
        let s = NetworkState::from_measurements(sph, near).unwrap();
        assert!(in_set_s(&s).is_certified());

        // four points spread around a great circle fit in no r*-ball
        let circle = ManifoldHandle::sphere(1);
        let spread: Vec<Point> = [0.0f64, FRAC_PI_2, PI, 1.5 * PI]
            .iter()
            .map(|t| {
                Point::new(circle, DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]))
                    .unwrap()
            })
            .collect();
        let s = NetworkState::from_measurements(circle, spread).unwrap();
        assert_eq!(in_set_s(&s), Certificate::Unknown);
    }

    #[test]
    fn basin_certificate() {
        let (g, s) = euclid_line_state(&[0.0, 1.0, 3.0]);
        assert!(in_s_conv(&g, &s).unwrap());

        let m = ManifoldHandle::sphere(2);
        let g2 = make_topology(&TopologySpec::Line(2)).unwrap();
        let e1 = Point::new(m, DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap();
        let e2 = Point::new(m, DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0])).unwrap();
        let far = NetworkState::from_measurements(m, vec![e1.clone(), e2]).unwrap();
        // cost = (pi/2)^2/2 > (r*)^2/2 = (pi/2)^2/2 — right at the boundary
        assert!(!in_s_conv(&g2, &far).unwrap());
        let near = NetworkState::from_measurements(
            m,
            vec![e1.clone(), m.exp(&m.random_tangent(&e1, 0.05, &mut ChaCha8Rng::seed_from_u64(0)))],
        )
        .unwrap();
        assert!(in_s_conv(&g2, &near).unwrap());
    }

    #[test]
    fn run_converges_and_serializes() {
        let m = ManifoldHandle::sphere(2);
        let g = make_topology(&TopologySpec::Ring(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let base = m.base_point();
        let measurements: Vec<Point> = (0..5)
            .map(|_| m.exp(&m.random_tangent(&base, 0.2, &mut rng)))
            .collect();
        let s0 = NetworkState::from_measurements(m, measurements).unwrap();
        let trace = run(&g, &s0, &StepSizePolicy::auto_descent(), 300, 1e-10).unwrap();
        assert!(trace.summary.converged);
        assert!(trace.summary.error.is_none());
        assert!(!trace.summary.exceeded_d_max);
        assert!(trace.summary.frechet_gap.is_finite());

        let csv = trace.trace_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,cost,grad_norm,max_pair_dist,max_edge_dist,in_S,in_S_conv,\
             dist_node_1_to_frechet,dist_node_2_to_frechet,dist_node_3_to_frechet,\
             dist_node_4_to_frechet,dist_node_5_to_frechet"
        );
        assert_eq!(csv.lines().count(), trace.records.len() + 1);
        let summary = trace.summary_csv(8);
        assert!(summary.starts_with("seed,epsilon,converged,frechet_gap\n8,"));
        // byte-identical on a repeat run
        let again = run(&g, &s0, &StepSizePolicy::auto_descent(), 300, 1e-10).unwrap();
        assert_eq!(csv, again.trace_csv());
    }

    #[test]
    fn run_rejects_bad_inputs() {
        let (_, s) = euclid_line_state(&[0.0, 1.0, 3.0]);
        let g5 = make_topology(&TopologySpec::Ring(5)).unwrap();
        assert!(matches!(
            run(&g5, &s, &StepSizePolicy::auto_descent(), 10, 1e-9),
            Err(Error::Contract(_))
        ));
        let disconnected =
            crate::network::Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let (_, s4) = euclid_line_state(&[0.0, 1.0, 3.0, 4.0]);
        assert!(matches!(
            run(&disconnected, &s4, &StepSizePolicy::auto_descent(), 10, 1e-9),
            Err(Error::DisconnectedGraph)
        ));
    }

    #[test]
    fn cut_locus_aborts_with_partial_trace() {
        let m = ManifoldHandle::sphere(1);
        let g = make_topology(&TopologySpec::Line(2)).unwrap();
        let a = Point::new(m, DMatrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let b = Point::new(m, DMatrix::from_column_slice(2, 1, &[-1.0, 0.0])).unwrap();
        let s = NetworkState::from_measurements(m, vec![a, b]).unwrap();
        let trace = run(&g, &s, &StepSizePolicy::auto_descent(), 10, 1e-9).unwrap();
        assert!(!trace.summary.converged);
        assert!(trace.summary.error.is_some());
    }
}
