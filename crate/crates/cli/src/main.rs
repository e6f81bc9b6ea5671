use std::collections::BTreeMap;
use std::io::Write;

fn main() {
    let env: BTreeMap<String, String> =
        std::env::vars().filter(|(k, _)| k.starts_with(polyzeta_cli::config::ENV_PREFIX)).collect();
    let out = polyzeta_cli::dispatch(std::env::args_os(), &env);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
