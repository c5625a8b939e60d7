//! Cone membership of a few pseudometrics on a three-point line.

use pmcone::cone::cone_report;
use pmcone::pseudometric::{d_of_functions, Pseudometric};
use pmcone::rational::{frac, int};
use pmcone::space::Space;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = Space::on_line(
        vec!["a".into(), "b".into(), "c".into()],
        &[int(0), int(1), int(3)],
    )?;
    let f = [int(0), int(2), int(2)];
    let candidates = [
        ("d_Z", Pseudometric::base(&z)),
        ("d_Z / 2", Pseudometric::base(&z).scale(&frac(1, 2))),
        ("discrete", Pseudometric::discrete(&z)),
        ("d({f})", d_of_functions(&z, &[f])?),
    ];
    for (name, d) in &candidates {
        let r = cone_report(d, &int(1))?;
        let peaks: Vec<String> = r.maximizers.iter().map(|p| z.show(*p)).collect();
        println!(
            "{name:<9} norm {:<3} lip {:<3} admissible {:<5} maximizers [{}] Pp {:<5} LPM_1 {}",
            r.sup_norm.to_string(),
            r.lip.to_string(),
            r.is_admissible,
            peaks.join(", "),
            r.in_pp,
            r.in_lpmk
        );
    }
    Ok(())
}
