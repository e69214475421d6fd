use std::process::ExitCode;

fn main() -> ExitCode {
    let args = std::env::args_os().skip(1);
    match cuspcalc::cli::dispatch(args) {
        Ok(result) => {
            print!("{}", result.render());
            ExitCode::from(result.exit_code() as u8)
        }
        Err(usage) => {
            if usage.exit_code == 0 {
                print!("{}", usage.text);
            } else {
                eprint!("{}", usage.text);
            }
            ExitCode::from(usage.exit_code as u8)
        }
    }
}
