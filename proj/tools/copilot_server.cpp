// SPDX-License-Identifier: Apache-2.0
// HTTP server for the copilot back end.
#include "copilot/app/app.hpp"
#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/service/api.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <iostream>
#include <thread>

using namespace copilot;

int main(int argc, char** argv)
{
    CLI::App cli{"copilot-server: multi-agent scientific copilot back end"};
    std::string config_path = "config/copilot.json";
    std::optional<std::string> host;
    std::optional<int> port;
    std::string level = "info";
    cli.add_option("-c,--config", config_path, "Configuration document")->check(CLI::ExistingFile);
    cli.add_option("--host", host, "Listen address (overrides the configuration)");
    cli.add_option("--port", port, "Listen port (overrides the configuration)");
    cli.add_option("--log-level", level, "debug, info, warn, error or off");
    CLI11_PARSE(cli, argc, argv);

    try {
        log::set_level(log::parse_level(level));
        auto config = app::load_app_config(config_path);
        if (host)
            config.server.host = *host;
        if (port)
            config.server.port = *port;

        // Block termination signals before any thread starts so sigwait sees them.
        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);

        app::App application(config);
        service::ApiHandler handler(service::ApiConfig{config.server.auth_header}, application.engine(),
                                    application.jobs(), application.artifacts());
        httplib::Server server;
        server.new_task_queue = [n = config.server.threads] { return new httplib::ThreadPool(n); };
        auto t = config.server.request_timeout;
        server.set_read_timeout(t.count(), 0);
        server.set_write_timeout(t.count(), 0);
        service::bind_routes(server, handler);

        std::thread waiter([&] {
            int sig = 0;
            sigwait(&set, &sig);
            log::info("signal ", sig, ", stopping");
            server.stop();
        });
        log::info("listening on ", config.server.host, ":", config.server.port, " with ",
                  application.agents().size(), " agents");
        if (!server.listen(config.server.host, config.server.port)) {
            std::cerr << "cannot listen on " << config.server.host << ":" << config.server.port << "\n";
            pthread_kill(waiter.native_handle(), SIGTERM);
            waiter.join();
            return 1;
        }
        waiter.join();
        application.shutdown();
    } catch (const Error& e) {
        std::cerr << "copilot-server: " << e.category() << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
