//! Minimizing a small submodular energy with a single s-t min cut, checked
//! against enumeration.
//!
//! ```bash
//! cargo run --example graph_cut_energy
//! ```

use fasthash::maxflow::{reduce_energy_to_cut, EnergyInstance};

fn main() -> fasthash::Result<()> {
    // unary [cost(z=-1), cost(z=+1)], pairwise v * z_i * z_j with v <= 0
    let unary = vec![[0.0, 2.0], [1.0, 0.0], [0.5, 0.5], [3.0, 0.0]];
    let pairwise = vec![(0, 1, -0.75), (1, 2, -1.0), (2, 3, -0.25), (0, 2, -0.5)];
    let energy = EnergyInstance::new(unary, pairwise)?;

    let reduction = reduce_energy_to_cut(&energy)?;
    println!("arcs (from, to, capacity):");
    for (a, b, c) in reduction.graph.arcs() {
        println!("  {a} -> {b}  {c}");
    }
    let (z, e) = reduction.solve();
    println!("min cut assignment {z:?}, energy {e}");

    let mut best = (vec![], f64::INFINITY);
    for mask in 0u32..16 {
        let z: Vec<i8> = (0..4).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        let e = energy.energy(&z);
        if e < best.1 {
            best = (z, e);
        }
    }
    println!("enumeration:       {:?}, energy {}", best.0, best.1);

    // a positive coupling is not submodular
    let err = EnergyInstance::new(vec![[0.0, 0.0]; 2], vec![(0, 1, 1.0)]).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
