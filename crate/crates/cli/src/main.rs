use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_seed = std::env::var(derivcalc_cli::SEED_ENV).ok();
    let code = derivcalc_cli::run(
        std::env::args_os(),
        env_seed.as_deref(),
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
