fn main() {
    // Rust ignores SIGPIPE by default, which turns `mpi-recon pairs | head`
    // into a panic when the reader closes early. Restore the default
    // disposition so a broken pipe ends the process quietly, the way other
    // command-line tools behave.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(mpi_recon::run_cli(std::env::args_os()));
}
