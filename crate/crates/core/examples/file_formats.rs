// Writes and reads back the binary feature and code files used by the CLI.
//
//     cargo run --example file_formats

use fasthash::dataset::{codes_to_bytes, features_to_bytes, read_codes, read_features, write_codes, write_features};
use fasthash::{BitMatrix, FeatureMatrix};

fn main() -> fasthash::Result<()> {
    let dir = std::env::temp_dir();
    let x = FeatureMatrix::from_rows(&[vec![0.5, -1.0, 2.0], vec![1.5, 0.0, -2.0]])?;
    let codes = BitMatrix::from_codes(&[vec![1, -1, 1, 1], vec![-1, -1, 1, -1], vec![1, 1, 1, 1]])?;

    let fbytes = features_to_bytes(&x);
    let cbytes = codes_to_bytes(&codes);
    println!("features: {} bytes, magic {:?}", fbytes.len(), std::str::from_utf8(&fbytes[..4]).unwrap());
    println!("codes:    {} bytes, magic {:?}", cbytes.len(), std::str::from_utf8(&cbytes[..4]).unwrap());

    let (fp, cp) = (dir.join("fasthash_x.fhfm"), dir.join("fasthash_c.fhbc"));
    write_features(&fp, &x)?;
    write_codes(&cp, &codes)?;
    assert_eq!(read_features(&fp)?, x);
    assert_eq!(read_codes(&cp)?, codes);
    println!("round trip ok");

    // a truncated file is reported, not misread
    std::fs::write(&cp, &cbytes[..cbytes.len() - 1])?;
    println!("truncated: {}", read_codes(&cp).unwrap_err());
    std::fs::remove_file(fp)?;
    std::fs::remove_file(cp)?;
    Ok(())
}
