//! External battery and HVAC models running as child processes.
//!
//! Wire protocol (version 1): one UTF-8 JSON object per line on the child's
//! stdin and stdout.
//!
//! ```text
//! -> {"type":"init","protocol":1,"slot":"battery","dt_eff_s":0.5,"params":{...}}
//! <- {"type":"ready","protocol":1}
//! -> {"type":"step","step":1,"inputs":{...}}
//! <- {"type":"output","outputs":{...}}        or {"type":"error","message":"..."}
//! -> {"type":"shutdown"}
//! ```
//!
//! Battery inputs are `p_net_w`, `t_batt_c`, `dt_s`; outputs `soc`, `v_batt_v`,
//! `i_batt_a` and optionally `power_shortfall_w`. HVAC inputs are `t_cabin_c`,
//! `t_amb_c`, `speed_mps`, `g_solar`, `n_occ`, `dt_s`; outputs `q_hvac_w`,
//! `p_hvac_w`, `t_cabin_c`. Files ending in `.py` are started with `python3`
//! (override with `BEVSIM_PYTHON`); anything else is executed directly.

use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, ExitStatus, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::battery::{BatteryInput, BatteryModel, BatteryState, BatteryStep, PackLimits};
use crate::config::registry::ModelContext;
use crate::error::{Error, Result, StepError};
use crate::loads::{self, CabinInput, CabinModel, CabinState};

pub const PROTOCOL_VERSION: u32 = 1;
pub const PYTHON_ENV: &str = "BEVSIM_PYTHON";

/// Time allowed for a clean exit after `shutdown` before the child is killed.
pub const SHUTDOWN_GRACE: Duration = Duration::from_millis(500);

#[derive(Debug, Error)]
pub enum PluginError {
    #[error("cannot start {path}: {source}")]
    Spawn {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: handshake failed: {message}")]
    Handshake { path: String, message: String },
    #[error("{path}: protocol version {got} is not supported (expected {expected})")]
    Version { path: String, got: i64, expected: u32 },
    #[error("{path}: no reply within {timeout_ms} ms")]
    Timeout { path: String, timeout_ms: u64 },
    #[error("{path}: malformed reply: {message}")]
    Protocol { path: String, message: String },
    #[error("{path}: output violates model invariants: {message}")]
    Invariant { path: String, message: String },
    #[error("{path}: plugin reported an error: {message}")]
    Remote { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PluginSlot {
    Battery,
    Hvac,
}

impl PluginSlot {
    pub fn as_str(self) -> &'static str {
        match self {
            PluginSlot::Battery => "battery",
            PluginSlot::Hvac => "hvac",
        }
    }
}

/// A running plugin process after a successful handshake.
pub struct PluginHandle {
    path: String,
    slot: PluginSlot,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<io::Result<String>>,
    timeout: Duration,
    protocol: u32,
    steps: usize,
    exited: Option<ExitStatus>,
    killed: bool,
}

fn command_for(path: &str) -> Command {
    if Path::new(path).extension().and_then(|e| e.to_str()) == Some("py") {
        let python = std::env::var(PYTHON_ENV).unwrap_or_else(|_| "python3".into());
        let mut c = Command::new(python);
        c.arg(path);
        c
    } else {
        Command::new(path)
    }
}

impl PluginHandle {
    /// Spawns the plugin and completes the handshake.
    pub fn init(
        path: &str,
        slot: PluginSlot,
        params: Value,
        dt_eff_s: f64,
        timeout_ms: u64,
    ) -> Result<Self, PluginError> {
        if !Path::new(path).is_file() {
            return Err(PluginError::Spawn {
                path: path.into(),
                source: io::Error::new(io::ErrorKind::NotFound, "no such file"),
            });
        }
        let mut child = command_for(path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| PluginError::Spawn {
                path: path.into(),
                source,
            })?;
        let stdout = child.stdout.take().expect("stdout piped");
        let stdin = child.stdin.take();
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut handle = Self {
            path: path.into(),
            slot,
            child,
            stdin,
            lines: rx,
            timeout: Duration::from_millis(timeout_ms),
            protocol: 0,
            steps: 0,
            exited: None,
            killed: false,
        };
        let init = json!({
            "type": "init",
            "protocol": PROTOCOL_VERSION,
            "slot": slot.as_str(),
            "dt_eff_s": dt_eff_s,
            "params": params,
        });
        let reply = handle.request(&init).map_err(|e| match e {
            PluginError::Protocol { path, message } => PluginError::Handshake { path, message },
            other => other,
        })?;
        if reply.get("type").and_then(Value::as_str) != Some("ready") {
            handle.kill();
            return Err(PluginError::Handshake {
                path: path.into(),
                message: format!("expected a `ready` message, got {reply}"),
            });
        }
        let got = reply.get("protocol").and_then(Value::as_i64).unwrap_or(-1);
        if got != i64::from(PROTOCOL_VERSION) {
            handle.kill();
            return Err(PluginError::Version {
                path: path.into(),
                got,
                expected: PROTOCOL_VERSION,
            });
        }
        handle.protocol = PROTOCOL_VERSION;
        Ok(handle)
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn slot(&self) -> PluginSlot {
        self.slot
    }

    pub fn protocol(&self) -> u32 {
        self.protocol
    }

    /// Sends one step and returns the plugin's `outputs` object.
    pub fn step(&mut self, inputs: Value) -> Result<Map<String, Value>, PluginError> {
        self.steps += 1;
        let msg = json!({"type": "step", "step": self.steps, "inputs": inputs});
        let reply = self.request(&msg)?;
        match reply.get("type").and_then(Value::as_str) {
            Some("output") => match reply.get("outputs") {
                Some(Value::Object(m)) => Ok(m.clone()),
                _ => Err(self.protocol_error("`output` message without an `outputs` object")),
            },
            Some("error") => Err(PluginError::Remote {
                path: self.path.clone(),
                message: reply
                    .get("message")
                    .and_then(Value::as_str)
                    .unwrap_or("(no message)")
                    .to_string(),
            }),
            _ => Err(self.protocol_error(format!("unexpected message {reply}"))),
        }
    }

    /// Asks the plugin to exit, killing it after [`SHUTDOWN_GRACE`]. Returns
    /// the exit status if the process ended on its own. Safe to call twice.
    pub fn shutdown(&mut self) -> Option<ExitStatus> {
        if self.exited.is_some() || self.killed {
            return self.exited;
        }
        if let Some(mut stdin) = self.stdin.take() {
            let _ = stdin.write_all(b"{\"type\":\"shutdown\"}\n");
            let _ = stdin.flush();
        }
        let deadline = Instant::now() + SHUTDOWN_GRACE;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => {
                    self.exited = Some(status);
                    return self.exited;
                }
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
                _ => {
                    self.kill();
                    return None;
                }
            }
        }
    }

    fn kill(&mut self) {
        if !self.killed && self.exited.is_none() {
            let _ = self.child.kill();
            let _ = self.child.wait();
            self.killed = true;
        }
        self.stdin = None;
    }

    fn protocol_error(&self, message: impl Into<String>) -> PluginError {
        PluginError::Protocol {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    fn request(&mut self, msg: &Value) -> Result<Value, PluginError> {
        let Some(stdin) = self.stdin.as_mut() else {
            return Err(self.protocol_error("plugin is no longer running"));
        };
        let mut line = msg.to_string();
        line.push('\n');
        if let Err(source) = stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()) {
            self.kill();
            return Err(PluginError::Io {
                path: self.path.clone(),
                source,
            });
        }
        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(text)) => text,
            Ok(Err(source)) => {
                self.kill();
                return Err(PluginError::Io {
                    path: self.path.clone(),
                    source,
                });
            }
            Err(RecvTimeoutError::Timeout) => {
                self.kill();
                return Err(PluginError::Timeout {
                    path: self.path.clone(),
                    timeout_ms: self.timeout.as_millis() as u64,
                });
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.kill();
                return Err(self.protocol_error("plugin closed its output"));
            }
        };
        match serde_json::from_str::<Value>(&reply) {
            Ok(v @ Value::Object(_)) => Ok(v),
            _ => {
                self.kill();
                Err(self.protocol_error(format!("not a JSON object: {}", truncate(&reply, 120))))
            }
        }
    }
}

impl Drop for PluginHandle {
    fn drop(&mut self) {
        self.shutdown();
    }
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        let head: String = s.chars().take(n).collect();
        format!("{head}...")
    }
}

fn number(path: &str, outputs: &Map<String, Value>, key: &str) -> Result<f64, PluginError> {
    let v = outputs
        .get(key)
        .ok_or_else(|| PluginError::Protocol {
            path: path.into(),
            message: format!("missing output `{key}`"),
        })?
        .as_f64()
        .ok_or_else(|| PluginError::Protocol {
            path: path.into(),
            message: format!("output `{key}` is not a number"),
        })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(PluginError::Invariant {
            path: path.into(),
            message: format!("`{key}` is not finite"),
        })
    }
}

fn invariant(path: &str, message: String) -> PluginError {
    PluginError::Invariant {
        path: path.into(),
        message,
    }
}

/// Battery slot backed by a plugin process.
pub struct ExternalBattery {
    handle: PluginHandle,
    limits: PackLimits,
    state: BatteryState,
}

impl ExternalBattery {
    pub fn new(handle: PluginHandle, limits: PackLimits, initial: BatteryState) -> Self {
        Self {
            handle,
            limits,
            state: initial,
        }
    }

    fn validate(&self, out: &Map<String, Value>) -> Result<BatteryStep, PluginError> {
        let path = self.handle.path();
        let soc = number(path, out, "soc")?;
        let v_batt_v = number(path, out, "v_batt_v")?;
        let i_batt_a = number(path, out, "i_batt_a")?;
        let l = &self.limits;
        if !(0.0..=1.0).contains(&soc) || soc < l.soc_min || soc > l.soc_max {
            return Err(invariant(
                path,
                format!("soc {soc} outside [{}, {}]", l.soc_min, l.soc_max),
            ));
        }
        if v_batt_v <= 0.0 {
            return Err(invariant(path, format!("v_batt_v {v_batt_v} must be positive")));
        }
        let i_max = l.c_rate_charge_max.max(l.c_rate_discharge_max) * l.capacity_ah;
        if i_batt_a.abs() > i_max * (1.0 + 1e-9) {
            return Err(invariant(path, format!("|i_batt_a| {i_batt_a} exceeds {i_max}")));
        }
        let power_shortfall_w = match out.get("power_shortfall_w") {
            Some(_) => number(path, out, "power_shortfall_w")?.abs(),
            None => 0.0,
        };
        Ok(BatteryStep {
            state: BatteryState {
                soc,
                v_batt_v,
                i_batt_a,
                v_rc1_v: 0.0,
                v_rc2_v: 0.0,
            },
            power_shortfall_w,
        })
    }

    pub fn shutdown(&mut self) -> Option<ExitStatus> {
        self.handle.shutdown()
    }
}

impl BatteryModel for ExternalBattery {
    fn kind(&self) -> &'static str {
        "external"
    }

    fn state(&self) -> BatteryState {
        self.state
    }

    fn step(&mut self, input: &BatteryInput) -> Result<BatteryStep, StepError> {
        let out = self.handle.step(json!({
            "p_net_w": input.p_net_w,
            "t_batt_c": input.t_batt_c,
            "dt_s": input.dt_s,
        }))?;
        let step = self.validate(&out)?;
        self.state = step.state;
        Ok(step)
    }
}

/// HVAC slot backed by a plugin process.
pub struct ExternalCabin {
    handle: PluginHandle,
    rated_thermal_power_w: f64,
    capacitance_j_per_k: f64,
    state: CabinState,
}

impl ExternalCabin {
    fn validate(&self, out: &Map<String, Value>, dt: f64) -> Result<CabinState, PluginError> {
        let path = self.handle.path();
        let q_hvac_w = number(path, out, "q_hvac_w")?;
        let p_hvac_w = number(path, out, "p_hvac_w")?;
        let t_cabin_c = number(path, out, "t_cabin_c")?;
        if p_hvac_w < 0.0 {
            return Err(invariant(path, format!("p_hvac_w {p_hvac_w} is negative")));
        }
        if q_hvac_w.abs() > self.rated_thermal_power_w * (1.0 + 1e-9) {
            return Err(invariant(
                path,
                format!("|q_hvac_w| {q_hvac_w} exceeds rated {}", self.rated_thermal_power_w),
            ));
        }
        Ok(CabinState {
            t_cabin_c,
            q_hvac_w,
            p_hvac_w,
            q_net_w: self.capacitance_j_per_k * (t_cabin_c - self.state.t_cabin_c) / dt,
        })
    }
}

impl CabinModel for ExternalCabin {
    fn kind(&self) -> &'static str {
        "external"
    }

    fn state(&self) -> CabinState {
        self.state
    }

    fn step(&mut self, input: &CabinInput) -> Result<CabinState, StepError> {
        let out = self.handle.step(json!({
            "t_cabin_c": self.state.t_cabin_c,
            "t_amb_c": input.t_amb_c,
            "speed_mps": input.speed_mps,
            "g_solar": input.g_solar_w_per_m2,
            "n_occ": input.n_occ,
            "dt_s": input.dt_s,
        }))?;
        let next = self.validate(&out, input.dt_s)?;
        self.state = next;
        Ok(next)
    }
}

fn section_params(section: &impl serde::Serialize, extra: &[(&str, Value)]) -> Value {
    let mut v = serde_json::to_value(section).expect("config serializes to JSON");
    if let Value::Object(m) = &mut v {
        for (k, x) in extra {
            m.insert((*k).to_string(), x.clone());
        }
    }
    v
}

pub fn external_battery_factory(ctx: &ModelContext<'_>) -> Result<Box<dyn BatteryModel>> {
    let b = &ctx.vehicle.battery;
    let path = b.external_module_path.as_deref().ok_or_else(|| {
        Error::schema("battery.external_module_path", "is required when battery.model is `external`")
    })?;
    let sim = &ctx.testcase.sim;
    let params = section_params(
        b,
        &[
            ("initial_soc", json!(sim.initial_soc)),
            ("initial_t_batt_c", json!(sim.initial_temps_c.battery)),
        ],
    );
    let dt_eff = ctx.dt_eff(ctx.vehicle.rate_divisors.battery);
    let handle = PluginHandle::init(path, PluginSlot::Battery, params, dt_eff, b.plugin_timeout_ms)?;
    Ok(Box::new(ExternalBattery::new(
        handle,
        PackLimits::from_config(b),
        BatteryState::at_rest(sim.initial_soc, b.v_nom_v),
    )))
}

pub fn external_cabin_factory(ctx: &ModelContext<'_>) -> Result<Box<dyn CabinModel>> {
    let h = &ctx.vehicle.hvac;
    let path = h.external_module_path.as_deref().ok_or_else(|| {
        Error::schema("hvac.external_module_path", "is required when hvac.model is `external`")
    })?;
    let t0 = ctx.testcase.sim.initial_temps_c.cabin;
    let params = section_params(
        h,
        &[
            ("initial_t_cabin_c", json!(t0)),
            ("active_setpoint_c", json!(loads::effective_setpoint(ctx))),
        ],
    );
    let dt_eff = ctx.dt_eff(ctx.vehicle.rate_divisors.loads_hvac);
    let handle = PluginHandle::init(path, PluginSlot::Hvac, params, dt_eff, h.plugin_timeout_ms)?;
    Ok(Box::new(ExternalCabin {
        handle,
        rated_thermal_power_w: h.rated_thermal_power_w,
        capacitance_j_per_k: h.cabin_capacitance_j_per_k,
        state: CabinState {
            t_cabin_c: t0,
            ..Default::default()
        },
    }))
}
