//! Seeded campaigns: how often a random configuration is in G, and how
//! often it has Property K, written as CSV.
//!
//! cargo run --example density_survey

use lpembed::experiments::{property_k_survey, sample_g_density, SampleCampaign, SurveySpec};
use lpembed::sampling::Distribution;
use lpembed::SearchStrategy;

fn main() -> lpembed::Result<()> {
    let campaign = SampleCampaign::new(4, 4, 1.5, 500, 42, Distribution::StandardGaussian)?;
    let density = sample_g_density(&campaign, 1e-10, 0)?;
    println!("{} of {} draws in G", density.in_g_count, campaign.trials);
    print!("{}", density.histogram_csv());

    let spec = SurveySpec {
        n_values: vec![3, 4],
        dim_values: vec![3, 4, 6],
        p_values: vec![1.5, 3.0],
        trials: 100,
        seed: 42,
        strategy: SearchStrategy::Greedy,
        tolerance: 1e-10,
    };
    print!("{}", property_k_survey(&spec, 0)?.to_csv());
    Ok(())
}
