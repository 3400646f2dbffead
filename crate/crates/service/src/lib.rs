//! Operator service: runs one session at a time and exposes it over a
//! line-delimited JSON socket and a WebSocket endpoint.

pub mod host;
pub mod server;

pub use host::{EngineHost, HostConfig};
pub use server::{serve, ServerConfig, Service};
