//! The `verify` report: re-runs the numerical cross-checks from
//! [`crate::checks`] against the geometry and protocol implementations and
//! collects pass/fail results suitable for a text report plus a CSV of
//! violations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checks::{
    cosine_law_third_side, finite_diff_gradient, hinge_second_difference,
    laplacian_consensus_oracle, H_FIRST, H_SECOND,
};
use crate::consensus::{self, mu_max_d, NetworkState, StepSizePolicy};
use crate::geometry::{ManifoldHandle, Point, Tangent};
use crate::network::{make_topology, TopologySpec};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub violations: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All checks in the report. Case counts are sized for an interactive run;
/// the heavier sampling lives in the test suite.
pub fn report() -> Vec<CheckResult> {
    vec![
        exp_log_round_trip(200),
        dist_equals_log_norm(200),
        gradient_identity(20),
        cosine_law_agreement(200),
        hinge_bound_sampling(200),
        step_size_constants(),
        euclidean_matches_laplacian_oracle(),
        monotone_cost(10),
    ]
}

/// One `check,detail` row per violation; empty violations column means the
/// file only carries the header.
pub fn violations_csv(results: &[CheckResult]) -> String {
    let mut out = String::from("check,detail\n");
    for r in results {
        for v in &r.violations {
            out.push_str(&format!("{},{}\n", r.name, v.replace(',', ";")));
        }
    }
    out
}

fn sample_manifolds() -> Vec<ManifoldHandle> {
    vec![
        ManifoldHandle::euclidean(3),
        ManifoldHandle::sphere(3),
        ManifoldHandle::special_orthogonal(4),
        ManifoldHandle::grassmann(5, 2),
    ]
}

/// A point scattered around the fixed base, plus a unit tangent there.
fn random_point_and_unit_dir(
    m: &ManifoldHandle,
    spread: f64,
    rng: &mut ChaCha8Rng,
) -> (Point, Tangent) {
    let x = m.exp(&m.random_tangent(&m.base_point(), spread, rng));
    let mut v = m.random_tangent(&x, 1.0, rng);
    let n = v.norm();
    v.value /= n;
    (x, v)
}

fn exp_log_round_trip(cases: usize) -> CheckResult {
    let mut violations = Vec::new();
    for m in sample_manifolds() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..cases {
            let (x, mut dir) = random_point_and_unit_dir(&m, 0.3, &mut rng);
            let len = rng.gen_range(1e-3..0.9 * m.r_star.min(2.0));
            dir.value *= len;
            let y = m.exp(&dir);
            match m.log(&x, &y) {
                Ok(back) => {
                    let err = (&back.value - &dir.value).norm();
                    if err > 1e-8 {
                        violations.push(format!("{:?}: round-trip error {err:.2e}", m.kind));
                    }
                }
                Err(e) => violations.push(format!("{:?}: log failed: {e}", m.kind)),
            }
        }
    }
    CheckResult {
        name: "exp_log_round_trip".into(),
        cases: cases * 4,
        violations,
    }
}

fn dist_equals_log_norm(cases: usize) -> CheckResult {
    let mut violations = Vec::new();
    for m in sample_manifolds() {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        for _ in 0..cases {
            let base = m.base_point();
            let x = m.exp(&m.random_tangent(&base, 0.4, &mut rng));
            let y = m.exp(&m.random_tangent(&base, 0.4, &mut rng));
            if let Ok(l) = m.log(&x, &y) {
                let err = (m.norm(&l) - m.dist(&x, &y)).abs();
                if err > 1e-10 {
                    violations.push(format!("{:?}: |log| vs dist gap {err:.2e}", m.kind));
                }
            }
        }
    }
    CheckResult {
        name: "dist_equals_log_norm".into(),
        cases: cases * 4,
        violations,
    }
}

fn gradient_identity(cases: usize) -> CheckResult {
    // grad of x -> 1/2 d^2(x, y) equals -log_x(y), probed directionally
    let mut violations = Vec::new();
    for m in sample_manifolds() {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        for _ in 0..cases {
            let base = m.base_point();
            let x = m.exp(&m.random_tangent(&base, 0.2, &mut rng));
            let y = m.exp(&m.random_tangent(&base, 0.2, &mut rng));
            let mut probe = m.random_tangent(&x, 1.0, &mut rng);
            let n = probe.norm();
            probe.value /= n;
            let fd = finite_diff_gradient(|p| 0.5 * m.dist(p, &y).powi(2), &probe, H_FIRST);
            let analytic = match m.log(&x, &y) {
                Ok(l) => -m.inner(&l, &probe).unwrap_or(f64::NAN),
                Err(_) => continue,
            };
            let err = (fd - analytic).abs() / analytic.abs().max(1e-3);
            if !(err < 1e-5) {
                violations.push(format!("{:?}: gradient mismatch {err:.2e}", m.kind));
            }
        }
    }
    CheckResult {
        name: "gradient_identity".into(),
        cases: cases * 4,
        violations,
    }
}

fn cosine_law_agreement(cases: usize) -> CheckResult {
    // intrinsic triangle third side vs the constant-curvature law of cosines
    let mut violations = Vec::new();
    for (m, kappa) in [
        (ManifoldHandle::sphere(2), 1.0),
        (ManifoldHandle::special_orthogonal(3), 0.25),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for _ in 0..cases {
            let (x, _) = random_point_and_unit_dir(&m, 0.3, &mut rng);
            let mut v1 = m.random_tangent(&x, 1.0, &mut rng);
            let mut v2 = m.random_tangent(&x, 1.0, &mut rng);
            let (n1, n2) = (v1.norm(), v2.norm());
            v1.value /= n1;
            v2.value /= n2;
            let l1 = rng.gen_range(0.1..1.2);
            let l2 = rng.gen_range(0.1..1.2);
            let cos_beta = m.inner(&v1, &v2).unwrap().clamp(-1.0, 1.0);
            let beta = cos_beta.acos();
            let a = m.exp(&v1.scale(l1));
            let b = m.exp(&v2.scale(l2));
            let intrinsic = m.dist(&a, &b);
            let law = cosine_law_third_side(kappa, l1, l2, beta).unwrap();
            if (intrinsic - law).abs() > 1e-8 {
                violations.push(format!(
                    "{:?}: intrinsic {intrinsic:.10} vs law {law:.10}",
                    m.kind
                ));
            }
        }
    }
    CheckResult {
        name: "cosine_law_agreement".into(),
        cases: cases * 2,
        violations,
    }
}

fn hinge_bound_sampling(cases: usize) -> CheckResult {
    // second difference of 1/2 d^2 along a geodesic hinge never exceeds the
    // curvature bound for unit joint velocity
    let mut violations = Vec::new();
    for m in sample_manifolds() {
        let d_max = if m.r_star.is_finite() {
            2.0 * m.r_star * 0.999
        } else {
            10.0
        };
        let bound = match mu_max_d(d_max, m.curv_lo, m.curv_hi) {
            Ok(b) => b,
            Err(e) => {
                violations.push(format!("{:?}: mu_max_d failed: {e}", m.kind));
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        for _ in 0..cases {
            let (x1, mut dir) = random_point_and_unit_dir(&m, 0.2, &mut rng);
            let l = rng.gen_range(0.05..d_max);
            dir.value *= l;
            let x2 = m.exp(&dir);
            let mut v1 = m.random_tangent(&x1, 1.0, &mut rng);
            let mut v2 = m.random_tangent(&x2, 1.0, &mut rng);
            let joint = (v1.norm().powi(2) + v2.norm().powi(2)).sqrt();
            v1.value /= joint;
            v2.value /= joint;
            let d2 = match hinge_second_difference(&v1, &v2, H_SECOND) {
                Ok(v) => v,
                Err(e) => {
                    violations.push(format!("{:?}: hinge failed: {e}", m.kind));
                    continue;
                }
            };
            if d2 > bound + 1e-6 {
                violations.push(format!(
                    "{:?}: second difference {d2:.8} exceeds bound {bound:.8} at l={l:.3}",
                    m.kind
                ));
            }
        }
    }
    CheckResult {
        name: "hinge_bound_sampling".into(),
        cases: cases * 4,
        violations,
    }
}

fn step_size_constants() -> CheckResult {
    let mut violations = Vec::new();
    let pi = std::f64::consts::PI;
    // the shared value for curvature spread [0, 1/2] at separation pi and
    // [0, 2] at separation pi/2
    for (d_max, hi) in [(pi, 0.5), (pi / 2.0, 2.0)] {
        match mu_max_d(d_max, 0.0, hi) {
            Ok(v) if (v - 3.792).abs() < 1e-3 => {}
            Ok(v) => violations.push(format!("mu_max_d({d_max:.4}, 0, {hi}) = {v:.6}, not 3.792")),
            Err(e) => violations.push(format!("mu_max_d failed: {e}")),
        }
    }
    for kappa in [0.0, 0.25, 1.0] {
        match mu_max_d(1.0, kappa, kappa) {
            Ok(v) if v == 2.0 => {}
            Ok(v) => violations.push(format!("constant curvature {kappa}: {v} != 2")),
            Err(e) => violations.push(format!("mu_max_d failed: {e}")),
        }
    }
    CheckResult {
        name: "step_size_constants".into(),
        cases: 5,
        violations,
    }
}

fn euclidean_matches_laplacian_oracle() -> CheckResult {
    let mut violations = Vec::new();
    let m = ManifoldHandle::euclidean(3);
    let g = make_topology(&TopologySpec::Ring(6)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let base = m.base_point();
    let measurements: Vec<Point> = (0..6)
        .map(|_| m.exp(&m.random_tangent(&base, 1.0, &mut rng)))
        .collect();
    let mut x0 = nalgebra::DMatrix::zeros(3, 6);
    for (i, p) in measurements.iter().enumerate() {
        x0.set_column(i, &nalgebra::DVector::from_column_slice(p.value.as_slice()));
    }
    let eps = 0.25;
    let mut state = NetworkState::from_measurements(m, measurements).unwrap();
    for iter in 1..=20usize {
        state = match consensus::step(&g, &state, eps) {
            Ok(s) => s,
            Err(e) => {
                violations.push(format!("step failed: {e}"));
                break;
            }
        };
        let oracle = laplacian_consensus_oracle(&g, &x0, eps, iter);
        for i in 0..6 {
            let col = nalgebra::DMatrix::from_column_slice(3, 1, oracle.column(i).as_slice());
            let gap = (&state.states[i].value - col).norm();
            if gap > 1e-10 {
                violations.push(format!("iter {iter} node {i}: oracle gap {gap:.2e}"));
            }
        }
    }
    CheckResult {
        name: "euclidean_matches_laplacian_oracle".into(),
        cases: 20,
        violations,
    }
}

fn monotone_cost(runs: usize) -> CheckResult {
    // auto-selected steps never increase the disagreement cost
    let mut violations = Vec::new();
    for m in [
        ManifoldHandle::euclidean(2),
        ManifoldHandle::sphere(3),
        ManifoldHandle::special_orthogonal(3),
    ] {
        for seed in 0..runs as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
            let g = make_topology(&TopologySpec::Circulant(8, vec![1, 2])).unwrap();
            let base = m.base_point();
            let measurements: Vec<Point> = (0..8)
                .map(|_| m.exp(&m.random_tangent(&base, 0.3, &mut rng)))
                .collect();
            let state = NetworkState::from_measurements(m, measurements).unwrap();
            let trace =
                match consensus::run(&g, &state, &StepSizePolicy::auto_descent(), 30, 1e-12) {
                    Ok(t) => t,
                    Err(e) => {
                        violations.push(format!("{:?} seed {seed}: run failed: {e}", m.kind));
                        continue;
                    }
                };
            for w in trace.records.windows(2) {
                if w[1].cost > w[0].cost + 1e-12 {
                    violations.push(format!(
                        "{:?} seed {seed}: cost rose {:.3e} -> {:.3e} at iter {}",
                        m.kind, w[0].cost, w[1].cost, w[1].iter
                    ));
                }
            }
        }
    }
    CheckResult {
        name: "monotone_cost".into(),
        cases: runs * 3,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_report_passes() {
        let results = report();
        assert_eq!(results.len(), 8);
        for r in &results {
            assert!(
                r.passed(),
                "{} failed: {:?}",
                r.name,
                &r.violations[..r.violations.len().min(3)]
            );
        }
        assert_eq!(violations_csv(&results), "check,detail\n");
    }

    #[test]
    fn violations_serialize_with_escaped_commas() {
        let r = CheckResult {
            name: "x".into(),
            cases: 1,
            violations: vec!["a, b".into()],
        };
        assert_eq!(violations_csv(&[r]), "check,detail\nx,a; b\n");
    }
}
