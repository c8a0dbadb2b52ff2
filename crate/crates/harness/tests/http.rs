use std::sync::Arc;

use kpa_harness::{run_scenario, HttpClient, InProcessClient, ScenarioId, ScriptedProvider};
use kpa_service::fixture::scenario_config;
use kpa_service::{AuthTable, KnowledgePlane, Server, ServiceConfig};

fn plane() -> Arc<KnowledgePlane> {
    let config = ServiceConfig {
        manual_tick: true,
        auth: AuthTable::with_default_roles(),
        ..ServiceConfig::default()
    };
    Arc::new(KnowledgePlane::new(scenario_config(), config).unwrap())
}

#[test]
fn http_transcripts_match_in_process() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    for id in ScenarioId::ALL {
        let server = rt
            .block_on(Server::start(plane(), "127.0.0.1:0".parse().unwrap()))
            .unwrap();
        let client = HttpClient::new(&server.url(), "admin-token").unwrap();
        let over_http = run_scenario(id, client, &mut ScriptedProvider).unwrap();
        assert!(over_http.passed(), "{}", over_http.render());

        let local = run_scenario(
            id,
            InProcessClient::new(plane(), "admin-token"),
            &mut ScriptedProvider,
        )
        .unwrap();
        assert_eq!(over_http.render(), local.render());
    }
}

#[test]
fn unreachable_server_is_a_transport_error() {
    let client = HttpClient::new("http://127.0.0.1:9", "admin-token").unwrap();
    let err = run_scenario(ScenarioId::S1SingleAttr, client, &mut ScriptedProvider)
        .err()
        .unwrap();
    assert!(err.to_string().contains("transport"), "{err}");
    assert!(HttpClient::new("not a url", "t").is_err());
}
