//! Python bindings: an in-process knowledge plane driven by manual ticks,
//! and a headless simulator run.

use std::sync::Arc;

use kpa_core::sim::{SimConfig, Simulator};
use kpa_service::fixture::scenario_config;
use kpa_service::{AuthTable, KnowledgePlane, Request, ServiceConfig};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn parse_config(json: Option<&str>, fixture: Option<&str>) -> PyResult<SimConfig> {
    match (json, fixture) {
        (Some(_), Some(_)) => Err(PyValueError::new_err(
            "give either sim_config or fixture, not both",
        )),
        (None, Some("scenario")) => Ok(scenario_config()),
        (None, Some(other)) => Err(PyValueError::new_err(format!("unknown fixture {other:?}"))),
        (Some(j), None) => {
            serde_json::from_str(j).map_err(|e| PyValueError::new_err(format!("sim_config: {e}")))
        }
        (None, None) => Ok(SimConfig::default()),
    }
}

/// Knowledge plane with the demo role tokens (`admin-token`,
/// `operator-token`, `tenant-token`, `readonly-token`). The clock only
/// moves through `tick()`.
#[pyclass(frozen, module = "kpa")]
struct Plane {
    inner: Arc<KnowledgePlane>,
}

#[pymethods]
impl Plane {
    #[new]
    #[pyo3(signature = (sim_config=None, *, fixture=None, snapshot_capacity=10_000))]
    fn new(sim_config: Option<&str>, fixture: Option<&str>, snapshot_capacity: usize) -> PyResult<Self> {
        let sim = parse_config(sim_config, fixture)?;
        let config = ServiceConfig {
            manual_tick: true,
            snapshot_capacity,
            auth: AuthTable::with_default_roles(),
            ..ServiceConfig::default()
        };
        let plane = KnowledgePlane::new(sim, config).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            inner: Arc::new(plane),
        })
    }

    /// Serve one request and return `(status, body)` with the body as JSON
    /// text. Stream routes return an empty body; use the HTTP server for
    /// those.
    #[pyo3(signature = (method, path, token=None, body=None))]
    fn request(
        &self,
        py: Python<'_>,
        method: &str,
        path: &str,
        token: Option<&str>,
        body: Option<&str>,
    ) -> (u16, String) {
        let mut req = Request::new(method, path);
        req.token = token.map(str::to_string);
        req.body = body.map(|b| b.as_bytes().to_vec()).unwrap_or_default();
        let resp = py.detach(|| self.inner.handle(req));
        (
            resp.status,
            String::from_utf8(resp.body_bytes()).unwrap_or_default(),
        )
    }

    /// Advance `count` ticks; returns the latest tick.
    #[pyo3(signature = (count=1))]
    fn tick(&self, py: Python<'_>, count: u64) -> PyResult<u64> {
        py.detach(|| self.inner.tick(count))
            .map_err(|e| PyOSError::new_err(e.to_string()))
    }

    #[getter]
    fn latest_tick(&self) -> u64 {
        self.inner.latest_tick()
    }
}

/// Run the simulator for `ticks` ticks and return every event as a JSON
/// string, in order.
#[pyfunction]
#[pyo3(signature = (ticks, sim_config=None, *, fixture=None))]
fn simulate(
    py: Python<'_>,
    ticks: u64,
    sim_config: Option<&str>,
    fixture: Option<&str>,
) -> PyResult<Vec<String>> {
    let config = parse_config(sim_config, fixture)?;
    let mut sim = Simulator::new(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.detach(|| {
        (0..ticks)
            .flat_map(|_| sim.tick())
            .map(|e| serde_json::to_string(&e).expect("event serializes"))
            .collect()
    }))
}

#[pymodule]
fn kpa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Plane>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
