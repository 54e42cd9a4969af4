//! Writes every library model to `<dir>/<name>.toml` (default `models/`).

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "models".into()));
    std::fs::create_dir_all(&dir)?;
    for d in dirac_core::models::library() {
        let path = dir.join(format!("{}.toml", d.name));
        std::fs::write(&path, d.model.to_toml())?;
        println!("{}", path.display());
    }
    Ok(())
}
