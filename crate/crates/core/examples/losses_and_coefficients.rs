// Compare the four pairwise losses and the per-bit BQP coefficients they induce.
//
//     cargo run --example losses_and_coefficients

use fasthash::loss::{bit_loss_terms, loss_value, pair_coefficient, PairState};
use fasthash::LossKind;

fn main() -> fasthash::Result<()> {
    let m = 8;
    println!("{:<6} {:>3} l(d) for d = 0..=8", "loss", "y");
    for kind in LossKind::ALL {
        for y in [1i8, -1] {
            let row: Vec<String> = (0..=m).map(|d| format!("{:7.2}", loss_value(kind, m, y, d).unwrap())).collect();
            println!("{:<6} {:>3} {}", kind.name(), y, row.join(""));
        }
    }

    // bit r = 4 with three earlier bits already differing by 1
    println!();
    for kind in LossKind::ALL {
        for y in [1i8, -1] {
            let s = PairState::new(y, 4, 1)?;
            let (same, differ) = bit_loss_terms(kind, s);
            println!(
                "{:<6} y={:>2}  l(same)={:8.3}  l(differ)={:8.3}  a={:8.3}",
                kind.name(),
                y,
                same,
                differ,
                pair_coefficient(kind, s)
            );
        }
    }
    Ok(())
}
