use maxclass::classifier::*;
use std::time::Instant;

fn main() {
    for p in [3u64, 5, 7] {
        let t0 = Instant::now();
        let r = verify_presentation_m2(p, 60).unwrap();
        println!(
            "m2 presentation p={p} bound=60: unique={} survivors={} elapsed={:?}",
            r.unique_extension_is_m2, r.survivor_count, t0.elapsed()
        );
    }

    let t0 = Instant::now();
    let r = verify_lambda_branch(5, 5, 200).unwrap();
    println!(
        "lambda branch (5,5,200): admissible={:?} quarter={:?} half_matches={} half_survivors={} zero_windows={} elapsed={:?}",
        r.admissible_lambda, r.quarter_branch, r.half_branch_matches_q_algebra,
        r.half_subtree_survivors, r.zero_windows_hold, t0.elapsed()
    );

    // is the p=3 family unique at bound 160?
    let t0 = Instant::now();
    let r = verify_p3_family(160).unwrap();
    println!(
        "p3 family (160): unique={:?} elapsed={:?}",
        r.unique_and_matches,
        t0.elapsed()
    );

    // classify(3,30,e3-nonzero) survivor inventory
    let report = classify(&ClassifyOptions::new(3, 30, BranchFilter::E3Nonzero)).unwrap();
    for s in &report.survivors {
        println!(
            "p=3 N=30 survivor: recognized={:?} mu={:?}",
            s.recognized,
            s.mu
        );
    }
}
