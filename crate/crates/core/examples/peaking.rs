//! Builds the peaking pseudometric for the zero pseudometric on a square
//! and prints each level.

use pmcone::cone::unique_peak;
use pmcone::pseudometric::Pseudometric;
use pmcone::space::Space;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels: Vec<String> = ["p", "q", "r", "s"].iter().map(|s| s.to_string()).collect();
    let z = Space::from_fn(labels, |i, j| {
        let k = (i as i64 - j as i64).rem_euclid(4);
        pmcone::rational::int(k.min(4 - k))
    })?;
    let d = Pseudometric::zero(&z);
    let t = pmcone::peaking::build_peaking(&d, 0, 1)?;
    println!("a = {}, b = {}, n0 = {}", t.a, t.b, t.n0);
    for (n, (annulus, level)) in t.annuli.iter().zip(&t.rho_levels).enumerate() {
        println!("level {}: support {:?}", n + 1, annulus.support());
        println!(
            "  rho_n = {:?}",
            level
                .rows()
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        );
    }
    let peak = unique_peak(&t.peaked()).expect("d + rho has one peak");
    println!(
        "rho(p, q) = {}, unique peak {}",
        t.rho.get(0, 1),
        z.show(peak)
    );
    println!("lip(rho) = {} <= {}", t.rho.lip_constant()?, t.lip_bound());
    Ok(())
}
