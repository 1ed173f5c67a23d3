//! Regenerates the sample arrangement and sheaf files under `data/`.
//!
//! cargo run -p hypcalc --example write_samples [DIR]

use hypcalc::arrangement::{corpus, enumerate_faces, Arrangement};
use hypcalc::hypsheaf::corpus::tilted_a1;
use hypcalc::hypsheaf::{constant_sheaf, direct_sum, skyscraper_sheaf, write_sheaf};
use std::path::PathBuf;
use std::sync::Arc;

fn main() -> hypcalc::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    std::fs::create_dir_all(&dir)?;
    let arrangements: [(&str, Arrangement); 6] = [
        ("a1", corpus::a1()),
        ("a2", corpus::a2()),
        ("a3", corpus::a3()),
        ("braid3", corpus::braid3()),
        ("four_lines", corpus::four_lines()),
        ("coord3", corpus::coord3()),
    ];
    for (name, a) in &arrangements {
        let text = serde_json::to_string_pretty(a)?;
        std::fs::write(dir.join(format!("{name}.json")), text + "\n")?;
        let p = Arc::new(enumerate_faces(a));
        write_sheaf(&constant_sheaf(p.clone()), dir.join(format!("const_{name}.json")))?;
        write_sheaf(&skyscraper_sheaf(p), dir.join(format!("sky_{name}.json")))?;
    }
    let t = tilted_a1();
    write_sheaf(&t, dir.join("tilted_a1.json"))?;
    write_sheaf(&t.verdier_dual(), dir.join("tilted_dual_a1.json"))?;
    write_sheaf(&direct_sum(&t, &constant_sheaf(t.poset().clone()))?, dir.join("tilted_plus_const_a1.json"))?;
    println!("wrote samples to {}", dir.display());
    Ok(())
}
