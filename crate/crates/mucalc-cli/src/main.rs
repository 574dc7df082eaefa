fn main() {
    // Placeholder until the CLI is implemented.
}
