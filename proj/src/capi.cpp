#include "respde.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "respde/experiment.hpp"
#include "respde/version.hpp"

struct rspde_session {
    respde::ExperimentConfig cfg;
    bool config_ok = true;
    std::string message;
    std::vector<std::string> files;
};

extern "C" {

const char* rspde_version(void) { return respde::library_version; }

rspde_session* rspde_open(const char* config_path) {
    auto* session = new (std::nothrow) rspde_session;
    if (!session) return nullptr;
    if (config_path) {
        try {
            session->cfg = respde::load_config(config_path);
        } catch (const std::exception& e) {
            session->config_ok = false;
            session->message = e.what();
        }
    }
    return session;
}

void rspde_close(rspde_session* session) { delete session; }

int rspde_set_seed(rspde_session* session, uint64_t seed) {
    if (!session) return RSPDE_INVALID;
    session->cfg.seed = seed;
    return RSPDE_OK;
}

int rspde_set_paths(rspde_session* session, uint64_t paths) {
    if (!session) return RSPDE_INVALID;
    session->cfg.paths = paths;
    return RSPDE_OK;
}

int rspde_set_output_dir(rspde_session* session, const char* dir) {
    if (!session || !dir) return RSPDE_INVALID;
    session->cfg.out_dir = dir;
    return RSPDE_OK;
}

int rspde_set_emit_plots(rspde_session* session, int enabled) {
    if (!session) return RSPDE_INVALID;
    session->cfg.emit_plots = enabled != 0;
    return RSPDE_OK;
}

int rspde_run(rspde_session* session, const char* command) {
    if (!session) return RSPDE_INVALID;
    session->files.clear();
    if (!session->config_ok) return RSPDE_INVALID;  // message already set at open
    if (!command) {
        session->message = "null command";
        return RSPDE_INVALID;
    }
    const std::string name = command;
    try {
        respde::CommandResult result;
        if (name == "simulate")
            result = respde::cmd_simulate(session->cfg);
        else if (name == "converge")
            result = respde::cmd_converge(session->cfg);
        else if (name == "compare")
            result = respde::cmd_compare(session->cfg);
        else if (name == "verify")
            result = respde::cmd_verify(session->cfg);
        else {
            session->message = "unknown command '" + name + "'";
            return RSPDE_INVALID;
        }
        session->message = result.message;
        session->files = result.files;
        return result.exit_code == 0 ? RSPDE_OK : RSPDE_VIOLATION;
    } catch (const std::invalid_argument& e) {
        session->message = e.what();
        return RSPDE_INVALID;
    } catch (const std::exception& e) {
        session->message = e.what();
        return RSPDE_INTERNAL;
    }
}

const char* rspde_message(const rspde_session* session) {
    return session ? session->message.c_str() : "";
}

size_t rspde_file_count(const rspde_session* session) {
    return session ? session->files.size() : 0;
}

const char* rspde_file_path(const rspde_session* session, size_t index) {
    if (!session || index >= session->files.size()) return nullptr;
    return session->files[index].c_str();
}

}  // extern "C"
