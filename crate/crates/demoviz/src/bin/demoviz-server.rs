use std::sync::Arc;

use clap::Parser;
use demoviz::service::{self, DEFAULT_HOST, DEFAULT_PORT};
use demoviz_core::{Compiler, SchemaSet};

#[derive(Parser)]
#[command(name = "demoviz-server", version, about = "HTTP API for demoviz")]
struct Args {
    #[arg(long, default_value = DEFAULT_HOST)]
    host: String,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    port: u16,
}

#[tokio::main]
async fn main() {
    let args = Args::parse();
    let schemas = match SchemaSet::from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    if let Err(e) = schemas.warm() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    if let Err(e) = service::serve(Arc::new(Compiler::new(schemas)), &args.host, args.port).await {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
