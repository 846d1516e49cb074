//! Expected metric at every node of the fast decoding tree of PAC(64,32)
//! with its Monte-Carlo rate profile.

use polarmetric::codes::CodeSpec;
use polarmetric::metric::{cumulative_metric_profile, expected_metric_tree};
use polarmetric::sim::{awgn_tree, mc_profile_64_32};

pub fn run_example() -> polarmetric::Result<()> {
    let spec = CodeSpec::pac(mc_profile_64_32());
    let ebn0 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2.5);
    let stats = awgn_tree(ebn0, spec.rate(), spec.n())?;
    let tree = expected_metric_tree(&spec, &stats)?;
    println!("Eb/N0 = {ebn0} dB");
    for node in &tree.nodes {
        println!(
            "{:indent$}{:>3} [{:2}..{:2}] {:8} mean {:.4} variance {:.4}",
            "",
            node.node_id,
            node.start,
            node.end,
            node.kind.to_string(),
            node.mean,
            node.variance,
            indent = 2 * node.depth
        );
    }
    let profile = cumulative_metric_profile(&tree);
    let (end, total) = profile.last().copied().unwrap_or((0, 0.0));
    println!("expected cumulative metric after bit {end}: {total:.3}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> polarmetric::Result<()> {
    run_example()
}
