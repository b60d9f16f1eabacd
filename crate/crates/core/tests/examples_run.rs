// Every example runs to completion and reports the values it advertises.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(bell_state);
example!(gibbs_implicitization);
example!(graph_states);
example!(info_projection);
example!(manifold_dimensions);
example!(petz_recovery);
example!(qcmi_variety);
example!(toric_ideal);

use qgm::matcore::scalar::rat;
use qgm::matcore::Matrix;

#[test]
fn bell_state() {
    let s = bell_state::run_example().unwrap();
    assert_eq!(s.marginal, Matrix::diag(&[rat(1, 2), rat(1, 2)]));
    assert!(s.joint_entropy.abs() < 1e-9);
    assert!((s.marginal_entropy - 1.0).abs() < 1e-12);
    assert!(s.sqrt_gap < 1e-6);
}

#[test]
fn gibbs_implicitization() {
    let c = gibbs_implicitization::run_example().unwrap();
    assert_eq!(c.decomposable, (9, 66));
    assert_eq!(c.lssm, (0, 0));
}

#[test]
fn graph_states() {
    let s = graph_states::run_example().unwrap();
    assert_eq!(s.words, ["XZZI", "ZXZZ", "ZZXI", "IZIX"]);
    assert_eq!(s.dimensions, [8, 4, 2, 1]);
    assert!(s.sign_basis);
}

#[test]
fn info_projection() {
    let o = info_projection::run_example().unwrap();
    assert!(o.result.residual < 1e-9);
    assert!(o.certificates.entropy_margin >= 0.0);
    assert!(o.certificates.minimality_margin >= 0.0);
    assert!(o.certificates.restart_spread <= 1e-8);
    assert!(o.gap_doubled < 5e-4, "doubled gap {}", o.gap_doubled);
}

#[test]
fn manifold_dimensions() {
    let dims: Vec<usize> = manifold_dimensions::run_example().unwrap().into_iter().map(|(_, d)| d).collect();
    assert_eq!(dims, [15, 10, 12, 3]);
}

#[test]
fn petz_recovery() {
    let rs = petz_recovery::run_example().unwrap();
    assert!(!rs.is_empty());
    for r in rs {
        assert!(r.max_error <= 1e-6, "{}: {}", r.graph, r.max_error);
        assert!(r.max_discrepancy <= 1e-8, "{}: {}", r.graph, r.max_discrepancy);
    }
}

#[test]
fn qcmi_variety() {
    let s = qcmi_variety::run_example().unwrap();
    assert!(s.residuals.linear < 1e-9);
    assert!(s.residuals.quintic < 1e-6);
    assert!(s.max_state_qcmi <= 1e-7);
    assert_eq!(s.linear_found, 6);
}

#[test]
fn toric_ideal() {
    let s = toric_ideal::run_example().unwrap();
    assert_eq!(s.hypercube_generators.len(), 10);
    assert_eq!((s.n_linear, s.n_toric, s.reduced_rank), (120, 56, 56));
    assert!(s.worst_residual < 1e-8);
}
