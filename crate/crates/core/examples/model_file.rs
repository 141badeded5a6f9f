//! Loading coefficient models from TOML descriptors and CSV tables.

use lc_jacobi::io::{load_model, ModelDescriptor};
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("lc-jacobi-model-file-example");
    std::fs::create_dir_all(&dir)?;

    // The first 64 entries of (n+1)^2 as a table; the rest is unknown.
    let table: String = (0..64).map(|n| format!("{n},{}\n", ((n + 1) * (n + 1)) as f64)).collect();
    std::fs::write(dir.join("a.csv"), format!("index,value\n{table}"))?;
    std::fs::write(dir.join("tab.toml"), "kind = \"tabulated\"\ntable = \"a.csv\"\n")?;
    std::fs::write(
        dir.join("c.toml"),
        "kind = \"power\"\np = 2\nshift = 1\nb_spec = \"constant_beta\"\nbeta = 0.5\n",
    )?;

    let c = load_model(dir.join("c.toml"))?;
    println!("model C: a_3 = {}, b_3 = {:.6}, β_3 = {}", c.a(3), c.b(3), c.beta(3));

    let tab = ModelDescriptor::load(dir.join("tab.toml"))?;
    let model = tab.build()?;
    println!("{:?} -> max index {:?}", tab.kind, model.max_index());

    match ModelDescriptor::parse("kind = \"power\"\np = -2\n", "inline", &dir) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
