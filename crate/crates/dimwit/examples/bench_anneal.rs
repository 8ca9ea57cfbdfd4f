//! Runs the annealing search over every non-trivial quantum cell and checks
//! the result against the known maxima. Pass cell codes (`54r`, `53c`, ...)
//! to restrict the sweep.

use dimwit::maxima::{anneal_quantum_max, known_quantum_max, AnnealConfig, Field};
use std::time::Instant;

fn main() {
    let all: Vec<(usize, usize, Field)> = vec![
        (2, 2, Field::Real),
        (3, 2, Field::Real),
        (3, 3, Field::Real),
        (4, 2, Field::Real),
        (4, 2, Field::Complex),
        (4, 3, Field::Real),
        (4, 4, Field::Real),
        (5, 2, Field::Real),
        (5, 2, Field::Complex),
        (5, 3, Field::Real),
        (5, 3, Field::Complex),
        (5, 4, Field::Real),
    ];
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cells: Vec<_> = if args.is_empty() {
        all
    } else {
        all.into_iter()
            .filter(|&(n, d, f)| {
                let code = match f {
                    Field::Real => format!("{n}{d}r"),
                    Field::Complex => format!("{n}{d}c"),
                };
                args.contains(&code)
            })
            .collect()
    };

    let cfg = AnnealConfig::default();
    let total_start = Instant::now();
    let mut failures = 0;
    for &(n, d, field) in &cells {
        let target = known_quantum_max(n, d, field).unwrap();
        let start = Instant::now();
        let (value, _) = anneal_quantum_max(n, d, field, &cfg).unwrap();
        let dt = start.elapsed().as_secs_f64();
        let ok = if target == 0.0 {
            value <= 1e-6
        } else {
            (target - value).abs() <= 1e-3
        };
        failures += usize::from(!ok);
        println!(
            "n={n} d={d} {field:?}: value={value:.9} target={target:.9} gap={:+.2e} {} [{dt:.1}s]",
            target - value,
            if ok { "OK" } else { "FAIL" }
        );
    }
    println!("total: {:.1}s", total_start.elapsed().as_secs_f64());
    std::process::exit(i32::from(failures > 0));
}
