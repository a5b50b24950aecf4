//! C interface to the road-space controller.
//!
//! Every function returns a [`RoadshareStatus`]. On failure a description is
//! kept per thread and can be read with [`roadshare_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use roadshare::agents::{Algo, Trainer};
use roadshare::config::ExperimentConfig;
use roadshare::neural::{load_checkpoint, save_checkpoint, Head, Mlp};
use roadshare::netgen::{build_template, GeometryOverrides, RoadNetwork, TemplateKind};
use roadshare::rowenv::{map_action, RowState, StateNorm};
use roadshare::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadshareStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Infeasible = 4,
    Io = 5,
    Numeric = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadshareAlgo {
    Ddpg = 0,
    Maddpg = 1,
}

/// Result of mapping a raw actor output onto an edge cross-section.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RoadshareRowAction {
    pub clipped: f64,
    pub lanes: u32,
    pub sidewalk_ratio: f64,
}

/// Summary of one training epoch.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RoadshareEpochStats {
    pub epoch: u64,
    pub start_slot: u64,
    pub epoch_reward: f64,
    pub mean_action: f64,
    pub mean_lanes: f64,
    pub mean_drive_speed_mps: f64,
    pub mean_walk_speed_mps: f64,
    pub mean_critic_loss: f64,
    /// Exploration scale after this epoch's decay.
    pub sigma: f64,
}

pub struct RoadshareNetwork(RoadNetwork);

pub struct RoadshareTrainer(Trainer);

/// A deterministic actor plus the state scaling it was trained with.
pub struct RoadsharePolicy {
    actor: Mlp,
    norm: StateNorm,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn fail(status: RoadshareStatus, msg: impl AsRef<str>) -> RoadshareStatus {
    set_error(msg.as_ref());
    status
}

fn status_of(err: &Error) -> RoadshareStatus {
    match err {
        Error::Config(_) | Error::Usage(_) => RoadshareStatus::Config,
        Error::Netgen(_) => RoadshareStatus::InvalidArgument,
        Error::Env(_) => RoadshareStatus::Infeasible,
        Error::Io { .. } | Error::Csv(_) => RoadshareStatus::Io,
        Error::Neural(_) | Error::Sim(_) | Error::Other(_) => RoadshareStatus::Numeric,
    }
}

fn from_error(err: impl Into<Error>) -> RoadshareStatus {
    let err = err.into();
    fail(status_of(&err), err.to_string())
}

/// Runs `f`, turning panics into `Panic` and clearing the error on success.
fn guard(f: impl FnOnce() -> RoadshareStatus) -> RoadshareStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(RoadshareStatus::Ok) => {
            set_error("");
            RoadshareStatus::Ok
        }
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(RoadshareStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, RoadshareStatus> {
    if p.is_null() {
        return Err(fail(RoadshareStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RoadshareStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($p:expr, $what:literal) => {
        if $p.is_null() {
            return fail(RoadshareStatus::NullPointer, concat!($what, " is null"));
        }
    };
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn roadshare_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds one of the template networks: `street_section`, `t_junction`,
/// `intersection` or `roundabout`.
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn roadshare_network_from_template(
    kind: *const c_char,
    out: *mut *mut RoadshareNetwork,
) -> RoadshareStatus {
    guard(|| {
        non_null!(out, "out");
        let kind = try_ffi!(c_str(kind, "kind"));
        let kind: TemplateKind = try_ffi!(kind.parse().map_err(from_error));
        let net = try_ffi!(build_template(kind, &GeometryOverrides::default()).map_err(from_error));
        *out = Box::into_raw(Box::new(RoadshareNetwork(net)));
        RoadshareStatus::Ok
    })
}

/// # Safety
/// `net` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_network_edge_count(net: *const RoadshareNetwork, out: *mut usize) -> RoadshareStatus {
    guard(|| {
        non_null!(net, "net");
        non_null!(out, "out");
        *out = (*net).0.num_edges();
        RoadshareStatus::Ok
    })
}

/// Width and facility-belt share of one edge.
///
/// # Safety
/// `net` must come from this library; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_network_edge_geometry(
    net: *const RoadshareNetwork,
    edge: usize,
    width_m: *mut f64,
    facility_ratio: *mut f64,
) -> RoadshareStatus {
    guard(|| {
        non_null!(net, "net");
        non_null!(width_m, "width_m");
        non_null!(facility_ratio, "facility_ratio");
        let net = &*net;
        let Some(e) = net.0.edges.get(edge) else {
            return fail(RoadshareStatus::InvalidArgument, format!("edge {edge} out of range"));
        };
        *width_m = e.width_m;
        *facility_ratio = e.facility_ratio;
        RoadshareStatus::Ok
    })
}

/// # Safety
/// `net` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn roadshare_network_free(net: *mut RoadshareNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Clips a raw sidewalk proportion, picks the lane count and snaps the
/// sidewalk to the remaining width.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_map_action(
    raw: f64,
    width_m: f64,
    facility_ratio: f64,
    out: *mut RoadshareRowAction,
) -> RoadshareStatus {
    guard(|| {
        non_null!(out, "out");
        if !(raw.is_finite() && width_m > 0.0 && (0.0..1.0).contains(&facility_ratio)) {
            return fail(RoadshareStatus::InvalidArgument, "raw, width_m or facility_ratio out of range");
        }
        let a = try_ffi!(map_action(0, raw, width_m, facility_ratio).map_err(from_error));
        *out = RoadshareRowAction {
            clipped: a.clipped,
            lanes: a.lanes,
            sidewalk_ratio: a.snapped_beta,
        };
        RoadshareStatus::Ok
    })
}

/// Creates a trainer from a TOML experiment config. A null `config_toml`
/// uses the defaults.
///
/// # Safety
/// `config_toml` must be null or NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_trainer_new(
    config_toml: *const c_char,
    algo: RoadshareAlgo,
    seed: u64,
    out: *mut *mut RoadshareTrainer,
) -> RoadshareStatus {
    guard(|| {
        non_null!(out, "out");
        let cfg = if config_toml.is_null() {
            ExperimentConfig::default()
        } else {
            try_ffi!(ExperimentConfig::parse(try_ffi!(c_str(config_toml, "config_toml"))).map_err(from_error))
        };
        let algo = match algo {
            RoadshareAlgo::Ddpg => Algo::Ddpg,
            RoadshareAlgo::Maddpg => Algo::Maddpg,
        };
        let scenario = try_ffi!(cfg.scenario().map_err(from_error));
        let trainer = try_ffi!(Trainer::new(algo, cfg.training, scenario, seed).map_err(from_error));
        *out = Box::into_raw(Box::new(RoadshareTrainer(trainer)));
        RoadshareStatus::Ok
    })
}

/// Runs one epoch of simulation and learning.
///
/// # Safety
/// `trainer` must come from this library; `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_trainer_train_epoch(
    trainer: *mut RoadshareTrainer,
    out: *mut RoadshareEpochStats,
) -> RoadshareStatus {
    guard(|| {
        non_null!(trainer, "trainer");
        let t = &mut (*trainer).0;
        let m = try_ffi!(t.train_epoch().map_err(from_error));
        if !out.is_null() {
            *out = RoadshareEpochStats {
                epoch: m.epoch as u64,
                start_slot: m.start_slot as u64,
                epoch_reward: m.epoch_reward,
                mean_action: m.mean_action,
                mean_lanes: m.mean_lanes,
                mean_drive_speed_mps: m.mean_drive_speed_mps,
                mean_walk_speed_mps: m.mean_walk_speed_mps,
                mean_critic_loss: m.mean_critic_loss,
                sigma: t.sigma(),
            };
        }
        RoadshareStatus::Ok
    })
}

/// Copies the actor currently controlling `edge` into a new policy handle.
///
/// # Safety
/// `trainer` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_trainer_policy(
    trainer: *const RoadshareTrainer,
    edge: usize,
    out: *mut *mut RoadsharePolicy,
) -> RoadshareStatus {
    guard(|| {
        non_null!(trainer, "trainer");
        non_null!(out, "out");
        let t = &(*trainer).0;
        let Some(actor) = t.actor_for(edge) else {
            return fail(RoadshareStatus::InvalidArgument, format!("edge {edge} out of range"));
        };
        *out = Box::into_raw(Box::new(RoadsharePolicy {
            actor: actor.clone(),
            norm: t.hp.state_norm(),
        }));
        RoadshareStatus::Ok
    })
}

/// # Safety
/// `trainer` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn roadshare_trainer_free(trainer: *mut RoadshareTrainer) {
    if !trainer.is_null() {
        drop(Box::from_raw(trainer));
    }
}

/// Loads an actor checkpoint. The default state scaling is assumed.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_policy_load(path: *const c_char, out: *mut *mut RoadsharePolicy) -> RoadshareStatus {
    guard(|| {
        non_null!(out, "out");
        let path = PathBuf::from(try_ffi!(c_str(path, "path")));
        let actor = try_ffi!(load_checkpoint(&path).map_err(from_error));
        if actor.input_dim() != 2 || actor.output_dim() != 1 || actor.head() != Head::Sigmoid {
            return fail(
                RoadshareStatus::InvalidArgument,
                format!("{} is not an actor checkpoint", path.display()),
            );
        }
        *out = Box::into_raw(Box::new(RoadsharePolicy {
            actor,
            norm: StateNorm::default(),
        }));
        RoadshareStatus::Ok
    })
}

/// # Safety
/// `policy` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn roadshare_policy_save(policy: *const RoadsharePolicy, path: *const c_char) -> RoadshareStatus {
    guard(|| {
        non_null!(policy, "policy");
        let path = PathBuf::from(try_ffi!(c_str(path, "path")));
        try_ffi!(save_checkpoint(&(*policy).actor, &path).map_err(|e| from_error(Error::io(&path, e))));
        RoadshareStatus::Ok
    })
}

/// Noise-free sidewalk proportion for the given mean vehicle and pedestrian
/// counts on an edge.
///
/// # Safety
/// `policy` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn roadshare_policy_act(
    policy: *const RoadsharePolicy,
    mean_veh_count: f64,
    mean_ped_count: f64,
    out: *mut f64,
) -> RoadshareStatus {
    guard(|| {
        non_null!(policy, "policy");
        non_null!(out, "out");
        if !(mean_veh_count >= 0.0 && mean_ped_count >= 0.0 && mean_veh_count.is_finite() && mean_ped_count.is_finite()) {
            return fail(RoadshareStatus::InvalidArgument, "counts must be finite and non-negative");
        }
        let p = &*policy;
        let s = RowState {
            edge: 0,
            mean_veh_count,
            mean_ped_count,
        }
        .normalized(&p.norm);
        let a = try_ffi!(p.actor.forward(&s).map_err(from_error));
        *out = a[0];
        RoadshareStatus::Ok
    })
}

/// # Safety
/// `policy` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn roadshare_policy_free(policy: *mut RoadsharePolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(roadshare_last_error_message()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn errors_are_reported_per_thread() {
        let mut net = ptr::null_mut();
        let kind = CString::new("hexagon").unwrap();
        let s = unsafe { roadshare_network_from_template(kind.as_ptr(), &mut net) };
        assert_eq!(s, RoadshareStatus::InvalidArgument);
        assert!(net.is_null());
        assert!(last_error().contains("hexagon"));
        std::thread::spawn(|| assert_eq!(last_error(), "")).join().unwrap();
    }

    #[test]
    fn null_out_pointer() {
        let kind = CString::new("street_section").unwrap();
        let s = unsafe { roadshare_network_from_template(kind.as_ptr(), ptr::null_mut()) };
        assert_eq!(s, RoadshareStatus::NullPointer);
    }
}
