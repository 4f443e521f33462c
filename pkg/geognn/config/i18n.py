"""Internationalization (i18n) module for geognn console messages."""

# Chinese messages
MESSAGES_ZH = {
    "command": "命令",
    "config": "配置",
    "config_valid": "配置有效",
    "config_invalid": "配置无效",
    "config_hash": "配置哈希",
    "output_dir": "输出目录",
    "dry_run": "仅校验配置，不写入任何文件",
    "seeds": "随机种子",
    "workers": "并行任务数",
    "building_graphs": "构建几何图",
    "spectrum": "谱分析",
    "converge": "收敛性扫描",
    "train": "训练",
    "transfer": "可迁移性评估",
    "classify": "点云分类",
    "epoch": "轮次",
    "loss": "损失",
    "accuracy": "准确率",
    "cell_failed": "单元失败",
    "k_clamped": "k 超过节点数，已截断",
    "acceptance": "验收检查",
    "acceptance_passed": "全部验收检查通过",
    "acceptance_failed": "验收检查失败",
    "oracle_regenerated": "基准文件已重新生成",
    "trends_skipped": "种子数不足，趋势检查将被跳过",
    "external_cloud": "外部点云",
    "files_written": "已写入文件",
    "warnings": "警告",
    "elapsed": "耗时",
    "done": "完成",
    "error": "错误",
}

# English messages
MESSAGES_EN = {
    "command": "Command",
    "config": "Config",
    "config_valid": "Configuration is valid",
    "config_invalid": "Configuration is invalid",
    "config_hash": "Config hash",
    "output_dir": "Output directory",
    "dry_run": "Dry run: configuration validated, nothing written",
    "seeds": "Seeds",
    "workers": "Workers",
    "building_graphs": "Building geometric graphs",
    "spectrum": "Spectrum analysis",
    "converge": "Convergence sweep",
    "train": "Training",
    "transfer": "Transferability evaluation",
    "classify": "Point-cloud classification",
    "epoch": "Epoch",
    "loss": "Loss",
    "accuracy": "Accuracy",
    "cell_failed": "Cell failed",
    "k_clamped": "k exceeds the node count and was clamped",
    "acceptance": "Acceptance checks",
    "acceptance_passed": "All acceptance checks passed",
    "acceptance_failed": "Acceptance checks failed",
    "oracle_regenerated": "Oracle fixtures regenerated",
    "trends_skipped": "Too few seeds, trend checks will be skipped",
    "external_cloud": "External point cloud",
    "files_written": "Files written",
    "warnings": "Warnings",
    "elapsed": "Elapsed",
    "done": "Done",
    "error": "Error",
}


def get_messages(lang: str = "cn") -> dict:
    """
    Get console messages dictionary by language.

    Args:
        lang: Language code, 'cn' for Chinese, 'en' for English.

    Returns:
        Dictionary of console messages.
    """
    if lang == "en":
        return MESSAGES_EN
    return MESSAGES_ZH


def get_message(key: str, lang: str = "cn") -> str:
    """
    Get a single console message by key and language.

    Args:
        key: Message key.
        lang: Language code, 'cn' for Chinese, 'en' for English.

    Returns:
        Message string, or the key itself when it is unknown.
    """
    return get_messages(lang).get(key, key)
