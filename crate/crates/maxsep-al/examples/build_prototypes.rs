//! Construct maximally separated prototype matrices and check their
//! geometry: unit-norm columns, all pairwise cosines at -1/(C-1).
//!
//!     cargo run --release --example build_prototypes

use maxsep_al::{build_prototypes, pairwise_cosine, verify_separation};

fn main() -> maxsep_al::Result<()> {
    let prototypes = build_prototypes(4)?;
    println!("prototype matrix for C = 4 (columns are class directions):");
    for row in prototypes.values().rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:+.4}")).collect();
        println!("  [{}]", cells.join(", "));
    }

    println!("\npairwise cosines (target off-diagonal: {:+.4}):", -1.0 / 3.0);
    let cosines = pairwise_cosine(&prototypes);
    for row in cosines.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:+.4}")).collect();
        println!("  [{}]", cells.join(", "));
    }

    println!("\nverification across class counts:");
    for c in [2usize, 3, 10, 100, 256] {
        let p = build_prototypes(c)?;
        let report = verify_separation(&p, 1e-9);
        println!(
            "  C = {c:>3}: pass = {}, max norm error {:.2e}, max angle error {:.2e}",
            report.pass, report.max_norm_error, report.max_angle_error
        );
    }
    Ok(())
}
