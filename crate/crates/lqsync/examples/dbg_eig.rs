use lqsync::eboss::{find_initial_q, path_following, EbossSpec, PathOptions};
use lqsync::exocore::build_exosystem;
use lqsync::matkit::Matrix;
use lqsync::model::AgentModel;

fn main() {
    let raw = Matrix::from_rows(&[
        &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        &[0.0, 1.0, 0.2, 1.0, 1.0, 0.0],
    ]);
    let exo = build_exosystem(&[(0.0, 2), (0.5, 1), (2.0, 1)], &raw, &[2.5, 1.5625, 0.5, 0.25]).unwrap();
    let a_b = Matrix::from_rows(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[1.0, 1.0, 0.0, 0.0],
        &[0.5, 1.0, 0.0, 1.0],
        &[0.0, 0.5, 1.5, 1.0],
    ]);
    let c_b = Matrix::from_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 2.0, 0.0]]);
    let b5 = Matrix::from_rows(&[&[0.0], &[1.0], &[0.0], &[0.0]]);
    let agent5 = AgentModel::new(a_b, b5, c_b);
    let spec5 = EbossSpec::new(&agent5, &exo, Matrix::identity(1), vec![1.7, 2.4]);
    let (q0, _) = find_initial_q(&spec5).unwrap();
    let opts = PathOptions { k_max: 40, ..Default::default() };
    let res = path_following(&spec5, &q0, &opts).unwrap();
    for pt in &res.history.points {
        println!(
            "k {:3} acc {:5} obj {:.6} alpha {:.4} |dQ| {:.4} drel {:.3e} Q [[{:.2},{:.2}],[.,{:.2}]]",
            pt.k, pt.accepted, pt.objective, pt.alpha, pt.dq_norm, pt.delta_rel,
            pt.q[(0, 0)], pt.q[(0, 1)], pt.q[(1, 1)]
        );
    }
}
