//! Extends a pseudometric from two points of a line to the whole line.

use pmcone::extend::{extend_lip_preserving, PartialPseudometric};
use pmcone::rational::{frac, int};
use pmcone::space::Space;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = Space::on_line(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        &[int(0), int(1), int(4), int(10)],
    )?;
    let pd = PartialPseudometric::from_labels(
        &z,
        &["a".into(), "c".into()],
        vec![vec![int(0), frac(3, 2)], vec![frac(3, 2), int(0)]],
    )?;
    let ext = extend_lip_preserving(&pd);
    for row in ext.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>4}")).collect();
        println!("{}", cells.join(" "));
    }
    println!("norm {} -> {}", pd.sup_norm(), ext.sup_norm());
    println!("lip  {} -> {}", pd.lip_constant(), ext.lip_constant()?);
    Ok(())
}
