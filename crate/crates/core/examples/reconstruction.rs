//! Recovers a hidden bijection from a composition oracle and classifies it.

use pmcone::operator::{compose, ConeFamily};
use pmcone::pseudometric::Pseudometric;
use pmcone::random::scaled_copy;
use pmcone::rational::int;
use pmcone::reconstruct::{classify, recover_doubleton_map, recover_point_map};
use pmcone::space::{Bijection, Space};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let y = Space::on_line(
        vec!["p".into(), "q".into(), "r".into(), "s".into(), "t".into()],
        &[int(0), int(1), int(3), int(4), int(9)],
    )?;
    let hidden = Bijection::new(vec![3, 0, 4, 1, 2])?;
    let x = scaled_copy(&y, "x", &hidden, &int(2));
    let mut oracle = compose(hidden.clone(), &x, &y, ConeFamily::Pm)?;

    let seeds = [Pseudometric::zero(&y), Pseudometric::base(&y)];
    let map = recover_doubleton_map(&mut oracle, &seeds, 3)?;
    for (pair, image) in &map.table {
        println!("{} -> {}", y.show(*pair), x.show(*image));
    }
    let result = recover_point_map(&map, &x, &y)?;
    println!("phi: {}", result.phi.show(&y, &x));
    assert_eq!(result.phi, hidden);

    let cert = classify(&mut oracle, &result)?;
    println!("verdict: {}, lambda = {}", cert.verdict, cert.lambda);
    println!("queries: {}", oracle.queries_used());
    Ok(())
}
