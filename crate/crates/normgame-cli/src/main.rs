fn main() {
    normgame_cli::app::main_entry();
}
