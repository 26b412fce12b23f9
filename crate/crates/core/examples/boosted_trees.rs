// Boosted trees against a linear hash on XOR-structured data.
//
//     cargo run --release --example boosted_trees

use fasthash::boost::{train_boosted_hash, train_linear_hash, BoostOptions, LinearOptions};
use fasthash::{quantize, XorClusters};

fn main() -> fasthash::Result<()> {
    let (x, y) = XorClusters::default().generate(3)?;
    let targets: Vec<i8> = y.iter().map(|&c| if c == 0 { 1 } else { -1 }).collect();
    let (_, q) = quantize(&x)?;

    let linear = train_linear_hash(&x, &targets, &LinearOptions::default())?;
    let linear_err = (0..x.n()).filter(|&i| linear.eval(x.row(i)).unwrap() != targets[i]).count();
    println!("linear      training error {:.3}", linear_err as f64 / x.n() as f64);

    for depth in [1, 2, 3] {
        let opts = BoostOptions { rounds: 50, max_depth: depth, seed: 3, ..BoostOptions::default() };
        let (h, report) = train_boosted_hash(&q, &targets, &opts)?;
        let err = (0..q.n()).filter(|&i| h.eval(&q.row(i)).unwrap() != targets[i]).count();
        let last = report.rounds.last().map_or(f64::NAN, |r| r.exp_loss);
        println!(
            "depth {depth}     training error {:.3}  ({} trees, final exp loss {last:.4})",
            err as f64 / q.n() as f64,
            h.trees().len()
        );
    }
    Ok(())
}
