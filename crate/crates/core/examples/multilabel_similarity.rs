//! Tag labels, one comma-separated line per example: two examples are similar when they share at least two tags and
//! dissimilar when they share none.
//!
//! ```bash
//! cargo run --example multilabel_similarity
//! ```

use fasthash::{build_similarity, Labels, SimilarityMode};

fn main() -> fasthash::Result<()> {
    let text = "\
beach,sea,sun
sea,sun,boat
mountain,snow
snow,ski,mountain
city,night
sea,boat,harbour,night
";
    let labels = Labels::parse(text, SimilarityMode::Multilabel)?;
    let sim = build_similarity(&labels, 10, 0)?;
    for p in sim.pairs() {
        let kind = if p.y > 0 { "similar" } else { "dissimilar" };
        println!("{} ~ {}  {kind}", p.i, p.j);
    }
    println!("{} defined pairs among {} examples", sim.pair_count(), sim.n());

    let rel = labels.relevance(&labels)?;
    println!("example 1 has {} relevant items", rel.relevant_count(1));
    Ok(())
}
