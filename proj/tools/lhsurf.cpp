#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "lh/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lambda-H surface representation, reconstruction and hole inpainting"};
    app.require_subcommand(1);
    lh::cli::add_commands(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(lh::ErrorKind::input);
    } catch (const lh::Error& e) {
        std::fprintf(stderr, "lhsurf: %s\n", e.what());
        return e.exit_code();
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "lhsurf: out of memory\n");
        return static_cast<int>(lh::ErrorKind::numerical);
    }
    return 0;
}
