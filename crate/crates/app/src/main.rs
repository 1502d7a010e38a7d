use std::io::Write;

use clap::Parser;

use pcm_app::cli::{self, Cli, Command, EXIT_DATA, EXIT_USAGE};
use pcm_app::server::{router, AppState};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // `serve` needs the async runtime; everything else runs synchronously.
    if let Ok(Cli { command: Command::Serve { port, host, session_ttl } }) = Cli::try_parse_from(&args) {
        std::process::exit(serve(&host, port, session_ttl));
    }
    let stdin = std::io::stdin();
    let code = cli::run(args, &mut stdin.lock(), &mut std::io::stdout(), &mut std::io::stderr());
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}

fn serve(host: &str, port: u16, session_ttl: u64) -> i32 {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return EXIT_DATA;
        }
    };
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind((host, port)).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind {host}:{port}: {e}");
                return EXIT_USAGE;
            }
        };
        eprintln!("listening on http://{}", listener.local_addr().map_or_else(|_| format!("{host}:{port}"), |a| a.to_string()));
        let app = router(AppState::new(cli::idle_expiry(session_ttl)));
        match axum::serve(listener, app).await {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_DATA
            }
        }
    })
}
