use cstar_frames::properties::{all, Config};

#[test]
fn full_property_suite() {
    let cfg = Config { seed: 7, quick: false };
    let mut failed = Vec::new();
    for p in all() {
        let o = p.check(&cfg);
        println!(
            "{:<9} {:<36} {:>5} cases  worst {:.2e}  {}",
            o.area,
            o.name,
            o.cases,
            o.worst,
            if o.passed { "ok" } else { "FAIL" }
        );
        if !o.passed {
            failed.push(format!("{}/{}: {}", o.area, o.name, o.detail));
        }
    }
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn other_seeds_quick() {
    for seed in [11, 12, 13] {
        for o in cstar_frames::properties::run_all(&Config { seed, quick: true }) {
            assert!(o.passed, "seed {seed} {}/{}: {}", o.area, o.name, o.detail);
        }
    }
}
