//! Every cargo example runs to completion.

#[path = "../examples/balance_graceful.rs"]
mod balance_graceful;
#[path = "../examples/classify_tsp.rs"]
mod classify_tsp;
#[path = "../examples/ground_and_hcf.rs"]
mod ground_and_hcf;
#[path = "../examples/mock_campaign.rs"]
mod mock_campaign;
#[path = "../examples/oracle_tsp.rs"]
mod oracle_tsp;
#[path = "../examples/report_cactus.rs"]
mod report_cactus;
#[path = "../examples/score_and_rank.rs"]
mod score_and_rank;
#[path = "../examples/select_table1.rs"]
mod select_table1;
#[path = "../examples/table1_catalog.rs"]
mod table1_catalog;

#[test]
fn balance_graceful_runs() {
    balance_graceful::run_example().unwrap();
}

#[test]
fn classify_tsp_runs() {
    classify_tsp::run_example().unwrap();
}

#[test]
fn ground_and_hcf_runs() {
    ground_and_hcf::run_example().unwrap();
}

#[test]
fn mock_campaign_runs() {
    mock_campaign::run_example().unwrap();
}

#[test]
fn oracle_tsp_runs() {
    oracle_tsp::run_example().unwrap();
}

#[test]
fn report_cactus_runs() {
    report_cactus::run_example().unwrap();
}

#[test]
fn score_and_rank_runs() {
    score_and_rank::run_example().unwrap();
}

#[test]
fn select_table1_runs() {
    select_table1::run_example().unwrap();
}

#[test]
fn table1_catalog_runs() {
    table1_catalog::run_example().unwrap();
}
