use hgc::grid::cutoff::CutoffProfile;
use hgc::grid::Grid;
use hgc::group::HomogeneousGroup;
use hgc::multiplier::{builtin, lp};

fn main() {
    let e1 = HomogeneousGroup::euclidean(1);
    let w = Grid::new(vec![8.0], vec![512]).unwrap().reciprocal();
    for (name, m) in [
        ("constant", builtin::constant(&e1)),
        ("bracket1", builtin::euclidean_bracket(&e1, 1.0)),
    ] {
        let dd = lp::decompose(&m, &w, 8).unwrap();
        let zeta = CutoffProfile::new(0.5, 1.0).unwrap();
        let report = lp::tail_smoothness_check(&dd, &zeta, 3).unwrap();
        for row in &report.rows {
            if row.alpha.length() == 0 {
                println!(
                    "{name} I={} J={} terms: {}",
                    row.decay_exponent,
                    row.power,
                    row.terms.iter().map(|t| format!("{t:.2e}")).collect::<Vec<_>>().join(" ")
                );
            }
        }
    }
}
