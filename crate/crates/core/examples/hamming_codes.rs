//! Packing ±1 codes and comparing them by Hamming distance.
//!
//! ```bash
//! cargo run --example hamming_codes
//! ```

use fasthash::{hamming_affinity, hamming_distance, BitMatrix};

fn main() -> fasthash::Result<()> {
    let a = vec![1, -1, 1, 1, -1, -1, 1, -1];
    let b = vec![1, 1, 1, -1, -1, -1, -1, -1];
    println!("d(a, b) = {}", hamming_distance(&a, &b)?);
    // affinity = m - 2d
    println!("affinity(a, b) = {}", hamming_affinity(&a, &b)?);

    // 70 bits spill into a second u64 word per code
    let codes: Vec<Vec<i8>> = (0..4)
        .map(|j| (0..70).map(|r| if (r * (2 * j + 1) + j) % 5 < 2 { 1 } else { -1 }).collect())
        .collect();
    let m = BitMatrix::from_codes(&codes)?;
    println!("{} codes, {} bits, {} words each", m.len(), m.bits(), m.words_per_code());
    for j in 1..m.len() {
        println!("d(code 0, code {j}) = {}", m.distance_to(0, &m, j)?);
    }
    Ok(())
}
