//! A short seeded fuzz run, then the same run with the broken extension.

use pmcone::fuzz::{run_fuzz, FuzzConfig};

fn main() {
    let mut config = FuzzConfig {
        trials: 50,
        max_points: 6,
        seed: 11,
        ..FuzzConfig::default()
    };
    print!("{}", run_fuzz(&config).render(&config));
    config.break_extension = true;
    print!("{}", run_fuzz(&config).render(&config));
}
