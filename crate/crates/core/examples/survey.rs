use opgeo::campaign::{run_campaign, CampaignConfig};
use std::time::Instant;

fn main() {
    let trials: usize = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(100);
    for id in opgeo::chains::REGISTRY_IDS {
        let t0 = Instant::now();
        let cfg = CampaignConfig {
            trials,
            ..CampaignConfig::for_chain(id)
        };
        match run_campaign(&cfg) {
            Ok(r) => {
                let c = &r.chains[0];
                println!(
                    "{id:16} fn={:?} met={} fail={} err={} audit={} min={:?} {:.2}s {:?}",
                    c.fn_id,
                    c.hypothesis_met,
                    c.failures,
                    c.errors,
                    c.audit_failures,
                    c.min_slack,
                    t0.elapsed().as_secs_f64(),
                    c.first_error
                );
            }
            Err(e) => println!("{id}: {e}"),
        }
    }
}
