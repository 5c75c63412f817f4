//! The nearest-neighbor distance on a tiny hand-made pool: which candidate
//! best represents what is still unlabeled.

use alrl::alrl::{dis, mnnd_pick, CandidateSet};
use alrl::baselines::simple_mnnd_select;
use alrl::data::PoolState;
use ndarray::{array, Axis};

fn main() -> alrl::Result<()> {
    // a dense group on the left, a loose pair on the right, one labeled point
    let x = array![
        [0.0, 0.0],
        [-3.0, 0.0],
        [-3.2, 0.3],
        [-2.9, -0.2],
        [-3.1, 0.1],
        [3.0, 0.0],
        [3.5, 1.0],
    ];
    let pool = PoolState::new(x.nrows(), vec![0])?;
    let u = x.select(Axis(0), &pool.unlabeled);
    let l = x.select(Axis(0), &pool.labeled);
    println!("Dis(U, L) = {:.3}", dis(u.view(), l.view())?);

    let candidates = CandidateSet { candidates: vec![5, 1, 6, 1] };
    let out = mnnd_pick(&candidates, &pool.unlabeled, &pool.anchors(), x.view())?;
    for (s, d) in &out.scores {
        println!("promote {s}: Dis = {d:.3}");
    }
    println!("winner: {}", out.winner);

    let greedy = simple_mnnd_select(x.view(), &pool, 3)?;
    println!("greedy over the whole pool: {:?} with {:.3?}", greedy.selected, greedy.distances);
    Ok(())
}
