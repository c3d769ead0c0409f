//! The fine-grained uncertainty relation for projections with `PQP = lambda P`:
//! random pairs and states never cross the curve `f_lambda`, and single-block
//! pure states trace it out.
//!
//! ```text
//! cargo run --release --example uncertainty -- [samples]
//! ```

use qnetstates::dense::random_density;
use qnetstates::optimize::restart_rng;
use qnetstates::uncertainty::{f_lambda, figur_check, figur_values, random_projection_pair};

fn main() -> qnetstates::Result<()> {
    let samples: usize = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("samples"));
    println!("{:>7}  {:>8}  {:>12}", "lambda", "samples", "worst slack");
    for (i, lambda) in [0.1, 0.3, 0.5, 0.7, 0.9].into_iter().enumerate() {
        let mut rng = restart_rng(7, i);
        let mut worst = f64::INFINITY;
        for s in 0..samples {
            let pair = random_projection_pair(s as u64, lambda, 1 + s % 3, s % 2, (s / 2) % 3)?;
            let rho = random_density(vec![pair.dim()], 1 + s % pair.dim(), &mut rng)?;
            worst = worst.min(figur_check(&pair, &rho)?.slack());
        }
        println!("{lambda:>7.2}  {samples:>8}  {worst:>12.3e}");
    }

    // One block, P = |0><0| and Q onto sqrt(l)|0> + sqrt(1-l)|1>. The states
    // cos t|0> + sin t|1> with t between 0 and the angle of Q saturate it.
    let lambda: f64 = 0.3;
    let arc = ((1.0 - lambda) / lambda).sqrt().atan();
    println!("\nboundary at lambda = {lambda}: <P> = f(<Q>)");
    for i in 0..=5 {
        let theta = arc * i as f64 / 5.0;
        let p = theta.cos().powi(2);
        let q = (lambda.sqrt() * theta.cos() + (1.0 - lambda).sqrt() * theta.sin()).powi(2);
        println!(
            "  <Q>={q:.4}  <P>={p:.4}  f(<Q>)={:.4}  slack={:.1e}",
            f_lambda(lambda, q.min(1.0))?,
            figur_values(lambda, p, q).slack()
        );
    }
    Ok(())
}
