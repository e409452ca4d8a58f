// SPDX-License-Identifier: Apache-2.0
/*
Copyright (C) 2026 The vaefp Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vaefp {

enum class SyscallCategory : int {
	ProcessEvents = 0,
	SetUserIdEvents,
	NetworkEvents,
	FileDirAccessEvents,
	KernelModuleEvents,
	VirtualizationEvents,
	FdReplicationEvents,
	FileAttributeEvents,
	FsMountEvents,
	IoctlEvents,
	Untracked,
};

inline constexpr std::size_t kCategoryCount = 10;

inline constexpr std::array<std::string_view, kCategoryCount + 1> kCategoryNames = {
    "ProcessEvents",        "SetUserIdEvents",     "NetworkEvents",       "FileDirAccessEvents",
    "KernelModuleEvents",   "VirtualizationEvents", "FdReplicationEvents", "FileAttributeEvents",
    "FsMountEvents",        "IoctlEvents",          "Untracked",
};

constexpr std::string_view category_name(SyscallCategory c) {
	return kCategoryNames[static_cast<std::size_t>(c)];
}

struct TrackedSyscall {
	std::string_view name;
	SyscallCategory category;
};

// Tracked base syscalls, one entry per logical call. ABI-specific entry
// points (x32 compat, x64 wrappers) fold into these names.
inline constexpr std::array<TrackedSyscall, 66> kTrackedSyscalls = {{
    // process
    {"fork", SyscallCategory::ProcessEvents},
    {"vfork", SyscallCategory::ProcessEvents},
    {"execve", SyscallCategory::ProcessEvents},
    {"execveat", SyscallCategory::ProcessEvents},
    {"exit", SyscallCategory::ProcessEvents},
    {"kill", SyscallCategory::ProcessEvents},
    {"ptrace", SyscallCategory::ProcessEvents},
    {"prctl", SyscallCategory::ProcessEvents},
    {"arch_prctl", SyscallCategory::ProcessEvents},
    // set-user-id family
    {"setuid", SyscallCategory::SetUserIdEvents},
    {"setgid", SyscallCategory::SetUserIdEvents},
    {"setpgid", SyscallCategory::SetUserIdEvents},
    {"setsid", SyscallCategory::SetUserIdEvents},
    {"setreuid", SyscallCategory::SetUserIdEvents},
    {"setregid", SyscallCategory::SetUserIdEvents},
    {"setgroups", SyscallCategory::SetUserIdEvents},
    {"setresuid", SyscallCategory::SetUserIdEvents},
    {"setresgid", SyscallCategory::SetUserIdEvents},
    {"setfsuid", SyscallCategory::SetUserIdEvents},
    {"setfsgid", SyscallCategory::SetUserIdEvents},
    // network
    {"socket", SyscallCategory::NetworkEvents},
    {"connect", SyscallCategory::NetworkEvents},
    {"accept", SyscallCategory::NetworkEvents},
    {"bind", SyscallCategory::NetworkEvents},
    {"listen", SyscallCategory::NetworkEvents},
    {"accept4", SyscallCategory::NetworkEvents},
    // file and directory access
    {"open", SyscallCategory::FileDirAccessEvents},
    {"close", SyscallCategory::FileDirAccessEvents},
    {"openat", SyscallCategory::FileDirAccessEvents},
    {"mkdir", SyscallCategory::FileDirAccessEvents},
    {"rmdir", SyscallCategory::FileDirAccessEvents},
    {"rename", SyscallCategory::FileDirAccessEvents},
    {"creat", SyscallCategory::FileDirAccessEvents},
    {"link", SyscallCategory::FileDirAccessEvents},
    {"unlink", SyscallCategory::FileDirAccessEvents},
    {"symlink", SyscallCategory::FileDirAccessEvents},
    {"mknod", SyscallCategory::FileDirAccessEvents},
    {"mkdirat", SyscallCategory::FileDirAccessEvents},
    {"mknodat", SyscallCategory::FileDirAccessEvents},
    {"unlinkat", SyscallCategory::FileDirAccessEvents},
    {"renameat", SyscallCategory::FileDirAccessEvents},
    {"linkat", SyscallCategory::FileDirAccessEvents},
    {"symlinkat", SyscallCategory::FileDirAccessEvents},
    {"fchmodat", SyscallCategory::FileDirAccessEvents},
    {"renameat2", SyscallCategory::FileDirAccessEvents},
    // kernel modules
    {"create_module", SyscallCategory::KernelModuleEvents},
    {"init_module", SyscallCategory::KernelModuleEvents},
    {"delete_module", SyscallCategory::KernelModuleEvents},
    {"kexec_load", SyscallCategory::KernelModuleEvents},
    // process/app virtualization
    {"clone", SyscallCategory::VirtualizationEvents},
    {"clone3", SyscallCategory::VirtualizationEvents},
    {"process_vm_readv", SyscallCategory::VirtualizationEvents},
    {"process_vm_writev", SyscallCategory::VirtualizationEvents},
    // fd replication
    {"dup", SyscallCategory::FdReplicationEvents},
    {"dup2", SyscallCategory::FdReplicationEvents},
    {"dup3", SyscallCategory::FdReplicationEvents},
    // file attributes
    {"chmod", SyscallCategory::FileAttributeEvents},
    {"fchmod", SyscallCategory::FileAttributeEvents},
    {"chown", SyscallCategory::FileAttributeEvents},
    {"fchown", SyscallCategory::FileAttributeEvents},
    {"lchown", SyscallCategory::FileAttributeEvents},
    {"fchownat", SyscallCategory::FileAttributeEvents},
    // filesystem mounts
    {"mount", SyscallCategory::FsMountEvents},
    {"umount2", SyscallCategory::FsMountEvents},
    {"fsmount", SyscallCategory::FsMountEvents},
    // ioctl
    {"ioctl", SyscallCategory::IoctlEvents},
}};

// Strips kernel entry-point decoration: "__x32_compat_sys_execve/ptregs" -> "execve".
inline std::string base_syscall_name(std::string_view name) {
	static constexpr std::array<std::string_view, 4> prefixes = {
	    "__x32_compat_sys_", "__ia32_compat_sys_", "__x64_sys_", "__ia32_sys_"};
	for (auto p : prefixes) {
		if (name.starts_with(p)) {
			name.remove_prefix(p.size());
			break;
		}
	}
	if (auto slash = name.find('/'); slash != std::string_view::npos) {
		name = name.substr(0, slash);
	}
	// The umount2 syscall's kernel symbol is __x64_sys_umount.
	if (name == "umount") {
		return "umount2";
	}
	return std::string(name);
}

class SyscallTaxonomy {
public:
	SyscallTaxonomy() {
		m_by_name.reserve(kTrackedSyscalls.size());
		for (const auto& s : kTrackedSyscalls) {
			m_by_name.emplace(std::string(s.name), s.category);
			m_sorted.emplace_back(s.name);
		}
		std::sort(m_sorted.begin(), m_sorted.end());
		for (std::size_t i = 0; i < m_sorted.size(); ++i) {
			m_index.emplace(m_sorted[i], i);
		}
	}

	SyscallCategory classify(std::string_view name) const {
		auto it = m_by_name.find(base_syscall_name(name));
		return it == m_by_name.end() ? SyscallCategory::Untracked : it->second;
	}

	// Alphabetical position of a tracked base name, or -1.
	int feature_index(std::string_view name) const {
		auto it = m_index.find(base_syscall_name(name));
		return it == m_index.end() ? -1 : static_cast<int>(it->second);
	}

	std::size_t tracked_count() const { return m_sorted.size(); }
	const std::vector<std::string>& sorted_names() const { return m_sorted; }

	static const SyscallTaxonomy& standard() {
		static const SyscallTaxonomy instance;
		return instance;
	}

private:
	std::unordered_map<std::string, SyscallCategory> m_by_name;
	std::unordered_map<std::string, std::size_t> m_index;
	std::vector<std::string> m_sorted;
};

inline SyscallCategory classify_syscall(const SyscallTaxonomy& taxonomy, std::string_view name) {
	return taxonomy.classify(name);
}

} // namespace vaefp
