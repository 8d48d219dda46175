use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairtrack::assignment::oracle::enumerate_assignments;
use pairtrack::assignment::reference::hungarian;
use pairtrack::assignment::{murty_kbest, solve_optimal, AssignmentSolution, CostMatrix};

use crate::error::CliError;

/// Largest size checked against full enumeration; larger sizes are checked
/// against the reference Hungarian solver.
const ENUMERATION_LIMIT: usize = 7;
const TOLERANCE: f64 = 1e-9;

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CostMatrix {
    let entries = (0..n * n).map(|_| rng.gen_range(0.0..100.0)).collect();
    CostMatrix::new(n, entries).expect("finite square matrix")
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

fn is_ranked(m: &CostMatrix, ranked: &[AssignmentSolution]) -> bool {
    let distinct: BTreeSet<&Vec<usize>> = ranked.iter().map(|s| &s.assignment).collect();
    distinct.len() == ranked.len()
        && ranked
            .windows(2)
            .all(|w| w[0].total_cost <= w[1].total_cost + TOLERANCE)
        && ranked
            .iter()
            .all(|s| close(m.assignment_cost(&s.assignment), s.total_cost))
}

/// Whether both solvers agree with the oracle on `m`.
fn agrees(m: &CostMatrix, k: usize) -> Result<bool, CliError> {
    let err = |e| CliError::Input(format!("solver failed: {e}"));
    let best = solve_optimal(m).map_err(err)?;
    let ranked = murty_kbest(m, k).map_err(err)?;
    if !is_ranked(m, &ranked) {
        return Ok(false);
    }
    if m.size() <= ENUMERATION_LIMIT {
        let all = enumerate_assignments(m);
        let want = k.min(all.len());
        if ranked.len() != want || !close(best.total_cost, all[0].total_cost) {
            return Ok(false);
        }
        let oracle: BTreeSet<&Vec<usize>> = all.iter().map(|s| &s.assignment).collect();
        Ok(ranked
            .iter()
            .zip(&all)
            .all(|(r, o)| close(r.total_cost, o.total_cost) && oracle.contains(&r.assignment)))
    } else {
        let reference = hungarian(m).map_err(err)?;
        Ok(close(best.total_cost, reference.total_cost)
            && ranked.first().is_some_and(|r| close(r.total_cost, best.total_cost)))
    }
}

fn micros(d: Duration, trials: usize) -> f64 {
    d.as_secs_f64() * 1e6 / trials.max(1) as f64
}

pub fn run(sizes: &[usize], trials: usize, seed: u64, k: usize, timing: bool) -> Result<(), CliError> {
    if sizes.contains(&0) || k == 0 {
        return Err(CliError::Input("sizes and k must be at least 1".into()));
    }
    if timing {
        println!(
            "{:>5} {:>7} {:>10} {:>8} {:>12} {:>12}",
            "n", "trials", "oracle", "agree", "optimal_us", "kbest_us"
        );
    } else {
        println!("{:>5} {:>7} {:>10} {:>8}", "n", "trials", "oracle", "agree");
    }
    for &n in sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let matrices: Vec<CostMatrix> = (0..trials).map(|_| random_matrix(n, &mut rng)).collect();
        let mut agreed = 0;
        for m in &matrices {
            if agrees(m, k)? {
                agreed += 1;
            }
        }
        let oracle = if n <= ENUMERATION_LIMIT {
            "enumerate"
        } else {
            "hungarian"
        };
        let pct = 100.0 * agreed as f64 / trials.max(1) as f64;
        if timing {
            let t = Instant::now();
            for m in &matrices {
                let _ = solve_optimal(m);
            }
            let optimal = t.elapsed();
            let t = Instant::now();
            for m in &matrices {
                let _ = murty_kbest(m, k);
            }
            let ranked = t.elapsed();
            println!(
                "{:>5} {:>7} {:>10} {:>7.1}% {:>12.2} {:>12.2}",
                n,
                trials,
                oracle,
                pct,
                micros(optimal, trials),
                micros(ranked, trials)
            );
        } else {
            println!("{n:>5} {trials:>7} {oracle:>10} {pct:>7.1}%");
        }
    }
    Ok(())
}
