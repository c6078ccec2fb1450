mod support;

use std::io::Write;

use support::{run_equivalence, snapshot_all, Client};

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn live_verdicts_match_offline_and_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let client = Client::open(dir.path()).await;
    let stats = run_equivalence(&client, 400, 2024).await;
    assert!(stats.mismatches.is_empty(), "{:#?}", &stats.mismatches[..stats.mismatches.len().min(10)]);
    assert_eq!(stats.sequences, 400);
    let before = snapshot_all(&client).await;
    drop(client);

    let restarted = Client::open(dir.path()).await;
    let after = snapshot_all(&restarted).await;
    assert_eq!(before.len(), after.len());
    assert_eq!(before, after);
}

#[tokio::test]
async fn torn_final_record_is_ignored_on_restart() {
    let dir = tempfile::tempdir().unwrap();
    let client = Client::open(dir.path()).await;
    let v = client.create(serde_json::json!({ "preset": "strict", "lot_size": 1000 })).await;
    let id = v["id"].as_str().unwrap().to_string();
    for _ in 0..7 {
        client.post_outcome(&id, false).await;
    }
    let before = snapshot_all(&client).await;
    drop(client);

    let path = dir.path().join(format!("{id}.jsonl"));
    let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
    f.write_all(br#"{"schema_version":1,"recorded_at":"2026-"#).unwrap();
    drop(f);

    let restarted = Client::open(dir.path()).await;
    assert_eq!(snapshot_all(&restarted).await, before);
    let (status, v) = restarted.post_outcome(&id, true).await;
    assert_eq!(status, axum::http::StatusCode::OK);
    assert_eq!(v["sequence_number"], 8);
}

#[tokio::test]
async fn every_log_line_carries_the_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let client = Client::open(dir.path()).await;
    let v = client.create(serde_json::json!({ "preset": "relaxed", "lot_size": 500 })).await;
    let id = v["id"].as_str().unwrap().to_string();
    client.post_outcome(&id, true).await;
    client
        .call("POST", &format!("/sessions/{id}/amendments"), Some(serde_json::json!({ "sequence_number": 1, "is_defect": false })))
        .await;
    let text = std::fs::read_to_string(dir.path().join(format!("{id}.jsonl"))).unwrap();
    let kinds: Vec<String> = text
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            assert_eq!(v["schema_version"], 1);
            v["type"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(kinds, ["created", "outcome", "amendment"]);
}

#[tokio::test]
async fn logged_rejection_path_replays_to_the_same_stop() {
    // A CoNLL-sized lot with the published defect count, shuffled once.
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut lot: Vec<bool> = (0..3380).map(|i| i < 217).collect();
    lot.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(92));

    let dir = tempfile::tempdir().unwrap();
    let client = Client::open(dir.path()).await;
    let v = client
        .create(serde_json::json!({ "preset": "strict", "lot_size": 3380, "curtailment": "none" }))
        .await;
    let id = v["id"].as_str().unwrap().to_string();
    let mut stop = 0;
    for (m, &x) in lot.iter().enumerate() {
        let (_, v) = client.post_outcome(&id, x).await;
        if v["verdict"] != "continue" {
            assert_eq!(v["verdict"], "reject");
            stop = m + 1;
            break;
        }
    }
    assert!(stop > 0);
    drop(client);
    for _ in 0..3 {
        let again = Client::open(dir.path()).await;
        let (_, v) = again.call("GET", &format!("/sessions/{id}"), None).await;
        assert_eq!(v["inspected"], stop as u64);
        assert_eq!(v["verdict"], "reject");
    }
}
