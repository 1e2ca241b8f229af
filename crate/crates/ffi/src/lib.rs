//! C ABI over the `gridnav` crate.
//!
//! Objects are handed out as opaque pointers and must be released with the
//! matching `*_free` function. Every fallible call returns a
//! [`GridnavStatus`]; on failure a message for the calling thread is
//! available from [`gridnav_last_error_message`]. Output pointers are only
//! written on success.
//!
//! Coordinates use the map convention: x grows east, y grows north, and
//! `(0, 0)` is the south-west cell.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gridnav::agent::{rollout_policy, run_training, TrainConfig};
use gridnav::baselines::{astar, dijkstra, rrt_plan};
use gridnav::gridworld::{canonical_map, parse_map, read_map};
use gridnav::neuralnet::{load_checkpoint, save_checkpoint, NetworkParams};
use gridnav::{CellKind, Error, GridMap, Position};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridnavStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was out of range or not valid UTF-8.
    InvalidArgument = 2,
    /// Map text or file could not be parsed.
    MapFormat = 3,
    /// File could not be read or written.
    Io = 4,
    /// The end cannot be reached from the requested start.
    NoPath = 5,
    /// Checkpoint file is corrupt or incompatible.
    Checkpoint = 6,
    /// Training configuration is invalid.
    Config = 7,
    /// A caller-provided buffer was too small.
    BufferTooSmall = 8,
    /// Unexpected internal failure (a caught panic).
    Internal = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridnavCell {
    Free = 0,
    Obstacle = 1,
    Start = 2,
    End = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridnavAlgorithm {
    Astar = 0,
    Dijkstra = 1,
    Rrt = 2,
}

/// Opaque grid map.
pub struct GridnavMap(GridMap);

/// Opaque trained network.
pub struct GridnavNetwork(NetworkParams);

/// Opaque sequence of cells.
pub struct GridnavPath {
    cells: Vec<Position>,
    length: f64,
    reached_end: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GridnavStatus {
    match err {
        Error::MapFormat { .. } | Error::InvalidMap(_) => GridnavStatus::MapFormat,
        Error::InvalidPosition(_) | Error::ShapeMismatch { .. } => GridnavStatus::InvalidArgument,
        Error::NoPath(_) | Error::SampleBudgetExhausted(_) => GridnavStatus::NoPath,
        Error::Checkpoint(_) => GridnavStatus::Checkpoint,
        Error::Config(_) | Error::Corpus(_) => GridnavStatus::Config,
        Error::Io { .. } | Error::Csv(_) => GridnavStatus::Io,
    }
}

struct Failure(GridnavStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GridnavStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GridnavStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GridnavStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GridnavStatus::NullArgument, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            GridnavStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gridnav_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message size
/// including the terminator, or 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gridnav_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Parses map text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_parse(
    text: *const c_char,
    out: *mut *mut GridnavMap,
) -> GridnavStatus {
    guard(|| {
        let text = as_str(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, GridnavMap(parse_map(text)?));
        Ok(())
    })
}

/// Reads a map file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_load(
    path: *const c_char,
    out: *mut *mut GridnavMap,
) -> GridnavStatus {
    guard(|| {
        let path = as_str(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, GridnavMap(read_map(path)?));
        Ok(())
    })
}

/// The bundled 20×20 canonical map.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_canonical(out: *mut *mut GridnavMap) -> GridnavStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, GridnavMap(canonical_map()));
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_free(map: *mut GridnavMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Writes width and height.
///
/// # Safety
/// `map` must be a live map; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_size(
    map: *const GridnavMap,
    width: *mut usize,
    height: *mut usize,
) -> GridnavStatus {
    guard(|| {
        let map = &as_ref(map, "map")?.0;
        if width.is_null() || height.is_null() {
            return Err(null("output"));
        }
        *width = map.width();
        *height = map.height();
        Ok(())
    })
}

/// Writes the designated start and end cells.
///
/// # Safety
/// `map` must be a live map; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_endpoints(
    map: *const GridnavMap,
    start_x: *mut i32,
    start_y: *mut i32,
    end_x: *mut i32,
    end_y: *mut i32,
) -> GridnavStatus {
    guard(|| {
        let map = &as_ref(map, "map")?.0;
        if start_x.is_null() || start_y.is_null() || end_x.is_null() || end_y.is_null() {
            return Err(null("output"));
        }
        *start_x = map.start().x;
        *start_y = map.start().y;
        *end_x = map.end().x;
        *end_y = map.end().y;
        Ok(())
    })
}

/// Cell kind at `(x, y)`.
///
/// # Safety
/// `map` must be a live map; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_map_cell(
    map: *const GridnavMap,
    x: i32,
    y: i32,
    out: *mut GridnavCell,
) -> GridnavStatus {
    guard(|| {
        let map = &as_ref(map, "map")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = map.cell(Position::new(x, y)).ok_or_else(|| {
            Failure(
                GridnavStatus::InvalidArgument,
                format!("({x}, {y}) is off the map"),
            )
        })?;
        *out = match kind {
            CellKind::Free => GridnavCell::Free,
            CellKind::Obstacle => GridnavCell::Obstacle,
            CellKind::Start => GridnavCell::Start,
            CellKind::End => GridnavCell::End,
        };
        Ok(())
    })
}

/// Plans from `(start_x, start_y)` to the end. `algorithm` is a
/// [`GridnavAlgorithm`] value; `seed` and `max_samples` only matter for RRT.
///
/// # Safety
/// `map` must be a live map; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_plan(
    map: *const GridnavMap,
    algorithm: u32,
    start_x: i32,
    start_y: i32,
    seed: u64,
    max_samples: usize,
    out: *mut *mut GridnavPath,
) -> GridnavStatus {
    guard(|| {
        let map = &as_ref(map, "map")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let start = Position::new(start_x, start_y);
        let plan = match algorithm {
            a if a == GridnavAlgorithm::Astar as u32 => astar(map, start)?,
            a if a == GridnavAlgorithm::Dijkstra as u32 => dijkstra(map, start)?,
            a if a == GridnavAlgorithm::Rrt as u32 => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rrt_plan(map, start, max_samples, &mut rng)?
            }
            other => {
                return Err(Failure(
                    GridnavStatus::InvalidArgument,
                    format!("unknown algorithm {other}"),
                ))
            }
        };
        put(
            out,
            GridnavPath {
                cells: plan.path,
                length: plan.length,
                reached_end: true,
            },
        );
        Ok(())
    })
}

/// Number of cells in the path.
///
/// # Safety
/// `path` must be null or a live path.
#[no_mangle]
pub unsafe extern "C" fn gridnav_path_count(path: *const GridnavPath) -> usize {
    path.as_ref().map_or(0, |p| p.cells.len())
}

/// Sum of Euclidean step lengths.
///
/// # Safety
/// `path` must be null or a live path.
#[no_mangle]
pub unsafe extern "C" fn gridnav_path_length(path: *const GridnavPath) -> f64 {
    path.as_ref().map_or(0.0, |p| p.length)
}

/// Whether the path ends on the map's end cell.
///
/// # Safety
/// `path` must be null or a live path.
#[no_mangle]
pub unsafe extern "C" fn gridnav_path_reached_end(path: *const GridnavPath) -> bool {
    path.as_ref().is_some_and(|p| p.reached_end)
}

/// Copies cells as interleaved `x, y` pairs; `xy` must hold
/// `2 * capacity` values. Fails with `BufferTooSmall` when `capacity` is
/// less than [`gridnav_path_count`].
///
/// # Safety
/// `path` must be a live path; `xy` must point to `2 * capacity` writable
/// `int32_t` values.
#[no_mangle]
pub unsafe extern "C" fn gridnav_path_cells(
    path: *const GridnavPath,
    xy: *mut i32,
    capacity: usize,
) -> GridnavStatus {
    guard(|| {
        let path = as_ref(path, "path")?;
        if xy.is_null() {
            return Err(null("xy"));
        }
        if capacity < path.cells.len() {
            return Err(Failure(
                GridnavStatus::BufferTooSmall,
                format!("need {} cells, buffer holds {capacity}", path.cells.len()),
            ));
        }
        for (i, p) in path.cells.iter().enumerate() {
            *xy.add(2 * i) = p.x;
            *xy.add(2 * i + 1) = p.y;
        }
        Ok(())
    })
}

/// # Safety
/// `path` must be null or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gridnav_path_free(path: *mut GridnavPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Loads a network checkpoint.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_network_load(
    path: *const c_char,
    out: *mut *mut GridnavNetwork,
) -> GridnavStatus {
    guard(|| {
        let path = as_str(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, GridnavNetwork(load_checkpoint(path)?));
        Ok(())
    })
}

/// Writes a network checkpoint.
///
/// # Safety
/// `network` must be live; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gridnav_network_save(
    network: *const GridnavNetwork,
    path: *const c_char,
) -> GridnavStatus {
    guard(|| {
        let net = &as_ref(network, "network")?.0;
        let path = as_str(path, "path")?;
        save_checkpoint(path, net)?;
        Ok(())
    })
}

/// # Safety
/// `network` must be null or a pointer returned by this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn gridnav_network_free(network: *mut GridnavNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Trains a network on `map`. `config_toml` may be null for the default
/// configuration; otherwise it is a TOML training config in which omitted
/// keys take their defaults.
///
/// # Safety
/// `map` must be live; `config_toml` null or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_train(
    map: *const GridnavMap,
    config_toml: *const c_char,
    out: *mut *mut GridnavNetwork,
) -> GridnavStatus {
    guard(|| {
        let map = &as_ref(map, "map")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = if config_toml.is_null() {
            TrainConfig::default()
        } else {
            TrainConfig::from_toml(as_str(config_toml, "config_toml")?)?
        };
        put(out, GridnavNetwork(run_training(map, &config)?.params));
        Ok(())
    })
}

/// Q-values of the eight actions (east first, counter-clockwise) with the
/// robot at `(x, y)`.
///
/// # Safety
/// `network` and `map` must be live; `q_out` must hold 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn gridnav_network_q_values(
    network: *const GridnavNetwork,
    map: *const GridnavMap,
    x: i32,
    y: i32,
    q_out: *mut f64,
) -> GridnavStatus {
    guard(|| {
        let net = &as_ref(network, "network")?.0;
        let map = &as_ref(map, "map")?.0;
        if q_out.is_null() {
            return Err(null("q_out"));
        }
        let q = net.forward(&map.encode_state(Position::new(x, y))?)?;
        ptr::copy_nonoverlapping(q.as_ptr(), q_out, q.len());
        Ok(())
    })
}

/// Greedy rollout from `(start_x, start_y)`. A failed rollout still
/// succeeds as a call; check [`gridnav_path_reached_end`].
///
/// # Safety
/// `network` and `map` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gridnav_rollout(
    network: *const GridnavNetwork,
    map: *const GridnavMap,
    start_x: i32,
    start_y: i32,
    step_cap: usize,
    out: *mut *mut GridnavPath,
) -> GridnavStatus {
    guard(|| {
        let net = &as_ref(network, "network")?.0;
        let map = &as_ref(map, "map")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let rec = rollout_policy(map, net, Position::new(start_x, start_y), step_cap)?;
        put(
            out,
            GridnavPath {
                length: rec.path_length(),
                reached_end: rec.succeeded(),
                cells: rec.path,
            },
        );
        Ok(())
    })
}
