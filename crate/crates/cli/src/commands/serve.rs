use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use qcsample_session::{serve, ServiceConfig, SessionService};

use crate::args::load_plan;
use crate::error::{CliError, Result};

/// Run the session service.
///
/// Sessions live as one log file each under the storage directory and are
/// reloaded on start. With `--plan-file` a session for that plan is opened
/// first and its id printed.
#[derive(Debug, Args)]
pub struct ServeCmd {
    #[arg(long)]
    pub plan_file: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    #[arg(long, env = "QCSAMPLE_STORAGE_DIR", default_value = "sessions")]
    pub storage_dir: PathBuf,
    /// Sync every record to the device before replying.
    #[arg(long)]
    pub fsync: bool,
}

pub fn run(cmd: &ServeCmd) -> Result<()> {
    let plan = cmd.plan_file.as_deref().map(load_plan).transpose()?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let config = ServiceConfig { storage_dir: cmd.storage_dir.clone(), fsync: cmd.fsync };
        let service = Arc::new(SessionService::open(config).await?);
        if let Some(doc) = plan {
            let detail = service.create_from_plan(doc).await?;
            println!("session {}", detail.summary.id);
        }
        let listener = tokio::net::TcpListener::bind(cmd.bind).await?;
        println!("listening on http://{}", listener.local_addr()?);
        serve(listener, service).await?;
        Ok::<_, CliError>(())
    })
}
