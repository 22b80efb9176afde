use cfcap::{binary_adder_mac, brute_force_oracle, sigma1, OptimizerConfig};
use std::time::Instant;

fn main() {
    let mac = binary_adder_mac();
    let cfg = OptimizerConfig::default();
    let t0 = Instant::now();
    let base = sigma1(&mac, 0.0, &cfg).unwrap().value;
    println!("sigma1(0) = {base:.9}  [{:?}]", t0.elapsed());
    for delta in [2e-4, 2e-3, 2e-2, 0.05, 0.082, 0.1, 0.2, 0.3] {
        let t = Instant::now();
        let eval = sigma1(&mac, delta, &cfg).unwrap();
        let h = delta / 2.0;
        let quotient = (eval.value - h - base) / h;
        println!(
            "sigma1({delta:.4}) = {:.9}  gain {:+.6}  slack {:+.2e}  conv {}  quotient {:8.3}  [{:?}]",
            eval.value,
            eval.value - base,
            eval.constraint_slack,
            eval.converged,
            quotient,
            t.elapsed()
        );
    }
    for (delta, res) in [(0.0, 64), (0.02, 64), (0.3, 64)] {
        let t = Instant::now();
        let v = brute_force_oracle(&mac, delta, res).unwrap();
        println!("oracle({delta}, {res}) = {v:.9}  [{:?}]", t.elapsed());
    }
}
