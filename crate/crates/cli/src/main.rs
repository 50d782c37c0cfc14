use std::io::{BufRead, Write};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use cat_cli::{execute, load_rubric, load_schema, Cli, Cmd, Repl};
use cat_service::{Engine, EngineConfig, SystemClock};
use clap::Parser;

fn repl(mut repl: Repl) -> anyhow::Result<()> {
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    write!(stdout, "{}> ", repl.banner())?;
    stdout.flush()?;
    for line in stdin.lock().lines() {
        let reply = repl.handle(&line?);
        if reply.quit {
            break;
        }
        write!(stdout, "{}> ", reply.output)?;
        stdout.flush()?;
    }
    Ok(())
}

fn serve(cli: &Cli, addr: &str, config: EngineConfig) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        if let Some(dir) = &cli.data_dir {
            eprintln!("closed sessions are stored in {}", dir.display());
        }
        cat_service::serve(listener, Arc::new(Engine::new(config, Arc::new(SystemClock)))).await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Repl { schema, rubric, lang } => (|| {
            let schema = schema.as_deref().map(load_schema).transpose()?;
            repl(Repl::new(schema, load_rubric(rubric.as_deref())?, *lang))?;
            Ok(0)
        })(),
        Cmd::Serve { addr, rubric, salt } => (|| {
            let mut config = EngineConfig { rubric: load_rubric(rubric.as_deref())?, data_dir: cli.data_dir.clone(), ..EngineConfig::default() };
            if let Some(salt) = salt {
                config.salt = salt.clone();
            }
            serve(&cli, addr, config)?;
            Ok(0)
        })(),
        _ => execute(&cli).map(|outcome| {
            print!("{}", outcome.stdout);
            eprint!("{}", outcome.stderr);
            outcome.code
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
