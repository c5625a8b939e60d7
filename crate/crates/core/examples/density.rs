//! Perturbation, shrinking and separation near the boundary of `LPM_k`.

use pmcone::density::{perturb_to_admissible, separation_radius, shrink_into_lpmk};
use pmcone::pseudometric::Pseudometric;
use pmcone::rational::{frac, int};
use pmcone::space::Space;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = Space::on_line(
        vec!["a".into(), "b".into(), "c".into()],
        &[int(0), int(1), int(2)],
    )?;
    // zero on {b, c}, so not admissible
    let d = Pseudometric::new(
        &z,
        vec![
            vec![int(0), int(1), int(1)],
            vec![int(1), int(0), int(0)],
            vec![int(1), int(0), int(0)],
        ],
    )?;
    let eps = frac(1, 10);
    let p = perturb_to_admissible(&d, &int(2), &eps)?;
    let row: Vec<String> = p.rows()[1].iter().map(|v| v.to_string()).collect();
    println!(
        "perturbed row b: [{}], lip {}, distance {}",
        row.join(", "),
        p.lip_constant()?,
        p.sup_distance(&d)?
    );

    let boundary = Pseudometric::base(&z);
    let s = shrink_into_lpmk(&boundary, &eps)?;
    println!(
        "shrunk d_Z: lip {} < 1, distance {}",
        s.lip_constant()?,
        s.sup_distance(&boundary)?
    );

    let steep = boundary.scale(&int(3));
    let (pair, radius) = separation_radius(&steep, &int(2))?;
    println!("3 d_Z vs k = 2: pair {}, radius {radius}", z.show(pair));
    Ok(())
}
